#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lsilu/ordering.hpp"
#include "lsilu/symbolic.hpp"
#include "lsilu/sync_schedule.hpp"

namespace lsilu {

enum class LowerMethod { none, sr, er, automatic };

const char* to_string(LowerMethod m) noexcept;

struct SelectionConfig {
  // Even-Rows needs at least this many lower rows per worker...
  double er_rows_per_thread = 2.0;
  // ...and a max/mean row-nnz ratio over the lower rows no larger than this.
  double max_imbalance = 8.0;
};

// Stage structure in the factor ordering. Upper level l owns rows
// [level_ptr[l], level_ptr[l+1]); rows [upper_rows, n) form the lower stage.
struct StageLayout {
  Index n = 0;
  Index upper_rows = 0;
  std::vector<Index> level_ptr{0};
  LevelSource source = LevelSource::lower_AplusAT;

  Index num_levels() const noexcept { return static_cast<Index>(level_ptr.size()) - 1; }
  Index lower_rows() const noexcept { return n - upper_rows; }
  // Upper levels as row lists, for building schedules.
  std::vector<std::vector<Index>> upper_level_rows() const;
};

// Layout of a partition after build_level_permutation has been applied.
StageLayout stage_layout(const StagePartition& partition, Index n);

// Returns none, sr or er; never automatic.
LowerMethod select_lower_method(Index lower_rows, int nthreads, double imbalance, const SelectionConfig& config = {});

// max / mean stored entries over the lower-stage rows (0 when there are none).
double lower_row_imbalance(const IluFactors& f, const StageLayout& layout);

// Lower rows restricted to one contiguous column range: the upper level i
// block, or the trailing corner (columns >= upper_rows).
struct Subblock {
  Index col_begin = 0;
  Index col_end = 0;
  std::vector<Index> seg_begin;  // per lower row: first position at or after col_begin
  std::vector<Index> offset;     // per lower row prefix of entry counts (size lower_rows + 1)

  Index entries() const noexcept { return offset.empty() ? 0 : offset.back(); }
  Index row_entries(Index k) const {
    return offset[static_cast<std::size_t>(k) + 1] - offset[static_cast<std::size_t>(k)];
  }
};

// A contiguous run of a subblock's entries in row-major order; it may span rows.
struct Tile {
  Index begin = 0;  // flattened entry index within the subblock
  Index end = 0;
  Index first_row = 0;  // local lower-row indices (row - upper_rows)
  Index last_row = 0;
};

struct TileLayout {
  Index tile_size = 256;
  Index upper_rows = 0;
  // One subblock per upper level, then the corner.
  std::vector<Subblock> subblocks;
  std::vector<std::vector<Tile>> tiles;

  Index corner() const noexcept { return static_cast<Index>(subblocks.size()) - 1; }
  Index total_tiles() const;
};

// Greedy row-major split of each subblock into tiles of `tile_size` entries.
// Requires levels computed on lower(A + A^T) and no stored entry linking two
// distinct rows of the same upper level.
TileLayout build_tiles(const IluFactors& f, const StageLayout& layout, Index tile_size);

// Throws sr_dependency_violation for the first row holding an entry inside its own level block.
void check_intra_level_independence(const IluFactors& f, const StageLayout& layout);

// Lower rows split into one contiguous chunk per worker, balanced by stored
// entries left of the corner. bounds has nthreads + 1 local row offsets.
struct ErChunks {
  std::vector<Index> bounds;
};

ErChunks build_er_chunks(const IluFactors& f, const StageLayout& layout, int nthreads);

// Point-to-point schedule over the corner rows, levelled on the corner's own
// lower pattern. Used when the corner is factored in parallel.
SyncSchedule build_corner_schedule(const IluFactors& f, const StageLayout& layout, int nthreads);

// Whether the parallel-corner option applies at this size.
bool corner_worth_parallel(const StageLayout& layout, int nthreads);

// Segmented-Rows: per upper level divide that level's tiles, push its
// updates into every later tile as (source level, target tile) tasks, then
// factor the corner. The upper stage must already be factored.
void factor_sr(IluFactors& f, const StageLayout& layout, const TileLayout& tiles, WorkerPool& pool,
               CompletionFlags& flags, const SyncSchedule* corner_schedule = nullptr);

// Even-Rows: every worker eliminates its chunk of lower rows up to the
// corner, then after a single join the corner is factored (serially unless a
// corner schedule is given). The upper stage must already be factored.
void factor_er(IluFactors& f, const StageLayout& layout, const ErChunks& chunks, WorkerPool& pool,
               CompletionFlags& flags, const SyncSchedule* corner_schedule = nullptr);

}  // namespace lsilu
