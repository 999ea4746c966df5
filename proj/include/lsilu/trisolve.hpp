#pragma once

#include <span>
#include <vector>

#include "lsilu/factor_lower.hpp"
#include "lsilu/ordering.hpp"
#include "lsilu/symbolic.hpp"
#include "lsilu/sync_schedule.hpp"

namespace lsilu {

// forward solves L y = b (unit diagonal), backward solves U x = y.
enum class Triangle { forward, backward };

const char* to_string(Triangle t) noexcept;

// Every path accumulates a row as acc = b_i, then acc -= a_ic * x_c in
// ascending c, and (backward only) divides by u_ii. Paths therefore agree
// bit for bit.
std::vector<double> solve_serial(const IluFactors& f, std::span<const double> b, Triangle which);

// Levels of the forward triangle: computed on the strict lower factor pattern.
LevelSchedule forward_solve_levels(const IluFactors& f);

// Levels of the backward triangle in row ids: row i sits strictly after
// every j > i it reads from the upper pattern.
LevelSchedule backward_solve_levels(const IluFactors& f);

// Barrier-per-level baseline with static row chunks inside each level.
std::vector<double> solve_baseline_csrls(const IluFactors& f, std::span<const double> b, const LevelSchedule& levels,
                                         WorkerPool& pool, Triangle which);

// Point-to-point schedules over all rows for each triangle.
SyncSchedule forward_solve_schedule(const IluFactors& f, int nthreads);
SyncSchedule backward_solve_schedule(const IluFactors& f, int nthreads);

std::vector<double> solve_ls(const IluFactors& f, std::span<const double> b, const SyncSchedule& schedule,
                             WorkerPool& pool, CompletionFlags& flags, Triangle which);

// A run of consecutive tiles of one subblock that share boundary rows, so
// a single worker must walk them in order.
struct TileChain {
  Index first_tile = 0;
  Index last_tile = 0;  // inclusive
  int owner = 0;
};

struct LowerSolvePlan {
  StageLayout layout;
  LowerMethod method = LowerMethod::none;
  SyncSchedule upper_forward;   // upper rows only
  SyncSchedule upper_backward;  // upper rows only; lower columns are already solved
  TileLayout tiles;                            // sr
  std::vector<std::vector<TileChain>> chains;  // sr, one list per upper level
  ErChunks chunks;                             // er
};

// `method` must be resolved (none, sr or er). sr needs `tiles`, er needs `chunks`.
LowerSolvePlan build_lower_solve_plan(const IluFactors& f, const StageLayout& layout, LowerMethod method,
                                      const TileLayout* tiles, const ErChunks* chunks, int nthreads);

// Upper rows point-to-point, then the lower rows: forward gathers their
// upper-column contributions tile by tile (sr) or chunk by chunk (er) and
// finishes the corner serially; backward solves the corner serially first.
std::vector<double> solve_ls_lower(const IluFactors& f, std::span<const double> b, const LowerSolvePlan& plan,
                                   WorkerPool& pool, CompletionFlags& flags, Triangle which);

}  // namespace lsilu
