#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsilu/factor_lower.hpp"
#include "lsilu/factor_upper.hpp"
#include "lsilu/ordering.hpp"
#include "lsilu/symbolic.hpp"
#include "lsilu/trisolve.hpp"

namespace lsilu {

enum class SolvePath { serial, csrls, ls, ls_lower };

const char* to_string(SolvePath p) noexcept;

struct IluOptions {
  LevelSource levels_on = LevelSource::lower_AplusAT;
  PartitionConfig partition;
  int fill_level = 0;
  double drop_tol = 0.0;
  bool milu = false;
  LowerMethod lower = LowerMethod::automatic;
  SelectionConfig selection;
  Index tile_size = 256;
  // Factor the corner point-to-point when it is large enough.
  bool parallel_corner = false;
  // When false the input order is kept and every row is scheduled
  // point-to-point on the factor's own levels; there is no lower stage.
  bool level_order = true;
  SolvePath apply_path = SolvePath::ls_lower;

  void validate() const;
};

struct SetupStats {
  Index n = 0;
  Index nnz = 0;
  Index factor_nnz = 0;
  LevelStats levels;
  Index upper_rows = 0;
  Index lower_rows = 0;
  LowerMethod method = LowerMethod::none;
  // Automatic selection wanted segmented rows but the structure ruled it out.
  bool fell_back_to_er = false;
  double lower_imbalance = 0.0;
  Index dependencies = 0;
  Index cross_worker_dependencies = 0;
  Index retained_waits = 0;
  Index tiles = 0;
  bool parallel_corner = false;
};

// Incomplete LU of A in a level ordering, with the schedules needed to
// factor and apply it on a fixed worker pool. The pool must outlive it.
class IluPreconditioner {
 public:
  // A forced partition replaces the levels and stage split computed from A.
  IluPreconditioner(const CsrMatrix& a, const IluOptions& options, WorkerPool& pool,
                    std::optional<StagePartition> partition = std::nullopt);

  // Restores the assembled values of P A P^T before a new numeric factorization.
  void reset_values();
  // Parallel numeric factorization (upper stage, then the lower method).
  void factor();
  // Serial reference over all rows.
  void factor_serial();

  // Triangular solve in the factor ordering through the chosen path.
  std::vector<double> solve(std::span<const double> b, Triangle which, SolvePath path) const;
  // z = M^{-1} r in the caller's ordering.
  void apply(std::span<const double> r, std::span<double> z) const;
  std::vector<double> apply(std::span<const double> r) const;

  const IluFactors& factors() const noexcept { return f_; }
  const Permutation& permutation() const noexcept { return f_.perm; }
  const SetupStats& stats() const noexcept { return stats_; }
  const IluOptions& options() const noexcept { return opt_; }
  const StageLayout& layout() const noexcept { return layout_; }
  const LevelSchedule& level_schedule() const noexcept { return levels_; }
  const SyncSchedule& factor_schedule() const noexcept { return upper_; }
  std::uint64_t digest() const { return factor_digest(f_.val); }
  int nthreads() const noexcept { return pool_->size(); }

 private:
  IluOptions opt_;
  WorkerPool* pool_;
  mutable CompletionFlags flags_;
  LevelSchedule levels_;
  StageLayout layout_;
  IluFactors f_;
  std::vector<double> initial_;
  SyncSchedule upper_;
  std::optional<TileLayout> tiles_;
  std::optional<ErChunks> chunks_;
  std::optional<SyncSchedule> corner_;
  LevelSchedule forward_levels_;
  LevelSchedule backward_levels_;
  SyncSchedule forward_;
  SyncSchedule backward_;
  LowerSolvePlan lower_plan_;
  SetupStats stats_;
};

}  // namespace lsilu
