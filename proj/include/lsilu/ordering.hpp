#pragma once

#include <limits>
#include <vector>

#include "lsilu/sparse.hpp"

namespace lsilu {

// Which lower-triangular pattern produced a level schedule.
enum class LevelSource { lower_A, lower_AplusAT };

const char* to_string(LevelSource s) noexcept;

// Rows grouped by longest-path depth in a strictly lower dependency pattern.
// Rows inside a level are listed in ascending index order.
struct LevelSchedule {
  std::vector<Index> level_of;
  std::vector<std::vector<Index>> levels;
  LevelSource source = LevelSource::lower_AplusAT;

  Index num_levels() const noexcept { return static_cast<Index>(levels.size()); }
  Index num_rows() const noexcept { return static_cast<Index>(level_of.size()); }
};

struct PartitionConfig {
  Index min_level_rows = 16;
  double density_factor = 4.0;
  // When false, every failing level moves to the lower stage, not only the trailing run.
  bool suffix_only = true;

  void validate() const;
};

// Split of the levels into a level-scheduled upper stage and a trailing lower stage.
struct StagePartition {
  std::vector<std::vector<Index>> upper_levels;
  std::vector<Index> lower_rows;
  // First level not kept whole in the upper stage under the suffix rule.
  Index cut_level = 0;
  PartitionConfig config;
  LevelSource source = LevelSource::lower_AplusAT;

  Index upper_row_count() const;
  Index lower_row_count() const noexcept { return static_cast<Index>(lower_rows.size()); }
};

struct LevelStats {
  Index num_levels = 0;
  Index min_rows = 0;
  Index max_rows = 0;
  Index median_rows = 0;  // lower middle element for even counts
};

// `lower` must be strictly lower triangular.
LevelSchedule compute_levels(const SparsityPattern& lower, LevelSource kind);

// Dependency pattern for a matrix: lower(A) or lower(A + A^T).
SparsityPattern level_dependency_pattern(const SparsityPattern& a, LevelSource kind);

// `row_nnz` gives the stored entries of each row of the matrix the schedule
// was computed for; it drives the density test.
StagePartition partition_stages(const LevelSchedule& schedule, std::span<const Index> row_nnz,
                                const PartitionConfig& config);

// Keeps levels [0, cut) in the upper stage and moves the rest to the lower stage.
StagePartition partition_at(const LevelSchedule& schedule, Index cut_level);

// Upper levels in order (stable within each level), then the lower rows.
Permutation build_level_permutation(const StagePartition& partition);

// Reverse Cuthill-McKee over the symmetrized pattern.
Permutation rcm_order(const SparsityPattern& a);

LevelStats level_stats(const LevelSchedule& schedule);

}  // namespace lsilu
