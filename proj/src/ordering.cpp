#include <algorithm>
#include <cmath>
#include <string>

#include "lsilu/ordering.hpp"

namespace lsilu {
namespace {
inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }
}  // namespace

const char* to_string(LevelSource s) noexcept {
  return s == LevelSource::lower_A ? "A" : "AplusAT";
}

void PartitionConfig::validate() const {
  if (min_level_rows < 1) throw_error(ErrorCode::invalid_argument, "min_level_rows must be at least 1");
  if (!(density_factor > 0.0)) throw_error(ErrorCode::invalid_argument, "density_factor must be positive");
}

Index StagePartition::upper_row_count() const {
  Index count = 0;
  for (const auto& level : upper_levels) count += static_cast<Index>(level.size());
  return count;
}

LevelSchedule compute_levels(const SparsityPattern& lower, LevelSource kind) {
  LevelSchedule s;
  s.source = kind;
  s.level_of.assign(sz(lower.n), 0);
  Index depth = 0;
  // Predecessors always have smaller indices, so one ascending sweep finalizes each row.
  for (Index r = 0; r < lower.n; ++r) {
    Index lvl = 0;
    for (Index c : lower.row(r)) {
      if (c >= r) throw_error(ErrorCode::invalid_argument, "level pattern must be strictly lower triangular", r);
      lvl = std::max(lvl, s.level_of[sz(c)] + 1);
    }
    s.level_of[sz(r)] = lvl;
    depth = std::max(depth, lvl + 1);
  }
  if (lower.n == 0) return s;
  s.levels.resize(sz(depth));
  for (Index r = 0; r < lower.n; ++r) s.levels[sz(s.level_of[sz(r)])].push_back(r);
  return s;
}

SparsityPattern level_dependency_pattern(const SparsityPattern& a, LevelSource kind) {
  return kind == LevelSource::lower_A ? lower_pattern(a) : lower_pattern(symmetrize_pattern(a));
}

StagePartition partition_at(const LevelSchedule& schedule, Index cut_level) {
  if (cut_level < 0 || cut_level > schedule.num_levels())
    throw_error(ErrorCode::invalid_argument, "cut level out of range");
  StagePartition p;
  p.source = schedule.source;
  p.cut_level = cut_level;
  p.upper_levels.assign(schedule.levels.begin(), schedule.levels.begin() + cut_level);
  for (Index l = cut_level; l < schedule.num_levels(); ++l)
    p.lower_rows.insert(p.lower_rows.end(), schedule.levels[sz(l)].begin(), schedule.levels[sz(l)].end());
  std::sort(p.lower_rows.begin(), p.lower_rows.end());
  return p;
}

StagePartition partition_stages(const LevelSchedule& schedule, std::span<const Index> row_nnz,
                                const PartitionConfig& config) {
  config.validate();
  if (row_nnz.size() != sz(schedule.num_rows()))
    throw_error(ErrorCode::size_mismatch, "row_nnz length does not match the schedule");
  const Index n = schedule.num_rows();
  double total = 0.0;
  for (Index k : row_nnz) total += k;
  const double mean_density = n > 0 ? total / n : 0.0;

  std::vector<bool> accepted(schedule.levels.size());
  for (std::size_t l = 0; l < schedule.levels.size(); ++l) {
    const auto& rows = schedule.levels[l];
    double level_nnz = 0.0;
    for (Index r : rows) level_nnz += row_nnz[sz(r)];
    const double level_density = level_nnz / static_cast<double>(rows.size());
    accepted[l] = static_cast<Index>(rows.size()) >= config.min_level_rows &&
                  level_density <= config.density_factor * mean_density;
  }

  Index cut = 0;
  for (Index l = schedule.num_levels(); l > 0; --l) {
    if (accepted[sz(l - 1)]) {
      cut = l;
      break;
    }
  }

  StagePartition p;
  if (config.suffix_only) {
    p = partition_at(schedule, cut);
  } else {
    p.source = schedule.source;
    p.cut_level = cut;
    for (std::size_t l = 0; l < schedule.levels.size(); ++l) {
      if (accepted[l]) {
        p.upper_levels.push_back(schedule.levels[l]);
      } else {
        p.lower_rows.insert(p.lower_rows.end(), schedule.levels[l].begin(), schedule.levels[l].end());
      }
    }
    std::sort(p.lower_rows.begin(), p.lower_rows.end());
  }
  p.config = config;
  return p;
}

Permutation build_level_permutation(const StagePartition& partition) {
  std::vector<Index> order;
  for (const auto& level : partition.upper_levels) order.insert(order.end(), level.begin(), level.end());
  order.insert(order.end(), partition.lower_rows.begin(), partition.lower_rows.end());
  return Permutation::from_new_to_old(std::move(order));
}

LevelStats level_stats(const LevelSchedule& schedule) {
  LevelStats st;
  st.num_levels = schedule.num_levels();
  if (schedule.levels.empty()) return st;
  std::vector<Index> sizes;
  sizes.reserve(schedule.levels.size());
  for (const auto& level : schedule.levels) sizes.push_back(static_cast<Index>(level.size()));
  std::sort(sizes.begin(), sizes.end());
  st.min_rows = sizes.front();
  st.max_rows = sizes.back();
  st.median_rows = sizes[(sizes.size() - 1) / 2];
  return st;
}

}  // namespace lsilu
