#include <doctest.h>

#include "support.hpp"

using namespace lsilu;

namespace {

LevelSchedule sized_levels(const std::vector<Index>& sizes) {
  LevelSchedule s;
  Index next = 0;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    std::vector<Index> rows;
    for (Index k = 0; k < sizes[l]; ++k) {
      rows.push_back(next++);
      s.level_of.push_back(static_cast<Index>(l));
    }
    s.levels.push_back(rows);
  }
  return s;
}

}  // namespace

TEST_CASE("levels of small patterns") {
  const auto diag = compute_levels(SparsityPattern{4, {0, 0, 0, 0, 0}, {}}, LevelSource::lower_A);
  CHECK(diag.num_levels() == 1);
  CHECK(diag.levels[0] == std::vector<Index>{0, 1, 2, 3});

  const auto chain = compute_levels(SparsityPattern{4, {0, 0, 1, 2, 3}, {0, 1, 2}}, LevelSource::lower_A);
  CHECK(chain.num_levels() == 4);

  const auto diamond = compute_levels(SparsityPattern{4, {0, 0, 1, 2, 4}, {0, 0, 1, 2}}, LevelSource::lower_A);
  CHECK(diamond.levels == std::vector<std::vector<Index>>{{0}, {1, 2}, {3}});
  CHECK_THROWS_AS(compute_levels(SparsityPattern{2, {0, 1, 1}, {1}}, LevelSource::lower_A), Error);
}

TEST_CASE("levels match the longest path oracle on random patterns") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 300);
    const auto lower = oracle::random_lower(n, 1.0 + static_cast<double>(rng() % 4), rng);
    const auto s = compute_levels(lower, LevelSource::lower_A);
    CHECK(s.level_of == oracle::longest_path_depth(lower));
    for (Index r = 0; r < n; ++r)
      for (Index c : lower.row(r)) CHECK(s.level_of[static_cast<std::size_t>(c)] < s.level_of[static_cast<std::size_t>(r)]);
  }
}

TEST_CASE("level dependency pattern on A and A plus transpose") {
  SparsityPattern a{3, {0, 2, 3, 5}, {0, 2, 1, 1, 2}};
  CHECK(level_dependency_pattern(a, LevelSource::lower_A).col == std::vector<Index>{1});
  const auto sym = level_dependency_pattern(a, LevelSource::lower_AplusAT);
  CHECK(sym.row_start == std::vector<Index>{0, 0, 0, 2});
  CHECK(sym.col == std::vector<Index>{0, 1});
}

TEST_CASE("stage partition follows the suffix rule") {
  const std::vector<Index> uniform(3000 + 3 + 1000, 5);
  {
    const auto p = partition_stages(sized_levels({1000, 1000, 1000}), std::span(uniform).first(3000), {});
    CHECK(p.cut_level == 3);
    CHECK(p.lower_rows.empty());
  }
  {
    const auto p = partition_stages(sized_levels({1000, 3, 1000}), std::span(uniform).first(2003), {});
    CHECK(p.lower_rows.empty());
    CHECK(p.upper_levels.size() == 3);
  }
  {
    const auto p = partition_stages(sized_levels({1000, 1000, 8, 2}), std::span(uniform).first(2010), {});
    CHECK(p.cut_level == 2);
    CHECK(p.lower_row_count() == 10);
    CHECK(p.lower_rows.front() == 2000);
  }
  {
    PartitionConfig c;
    c.min_level_rows = 1;
    c.density_factor = std::numeric_limits<double>::infinity();
    const auto p = partition_stages(sized_levels({5, 1, 1, 1}), std::span(uniform).first(8), c);
    CHECK(p.lower_rows.empty());
  }
}

TEST_CASE("dense trailing levels leave the upper stage") {
  std::vector<Index> nnz(40, 3);
  for (Index i = 32; i < 40; ++i) nnz[static_cast<std::size_t>(i)] = 200;
  PartitionConfig c;
  c.min_level_rows = 4;
  const auto p = partition_stages(sized_levels({16, 16, 8}), nnz, c);
  CHECK(p.cut_level == 2);
  CHECK(p.lower_row_count() == 8);
}

TEST_CASE("non-suffix mode moves interior levels too") {
  const std::vector<Index> nnz(2003, 5);
  PartitionConfig c;
  c.suffix_only = false;
  const auto p = partition_stages(sized_levels({1000, 3, 1000}), nnz, c);
  CHECK(p.lower_row_count() == 3);
  CHECK(p.upper_levels.size() == 2);
}

TEST_CASE("partition config validation") {
  PartitionConfig c;
  c.min_level_rows = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.min_level_rows = 1;
  c.density_factor = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("level permutation") {
  const auto one = partition_at(sized_levels({4}), 1);
  CHECK(build_level_permutation(one) == Permutation::identity(4));

  StagePartition p;
  p.upper_levels = {{2}, {0}};
  p.lower_rows = {1};
  const auto perm = build_level_permutation(p);
  CHECK(std::vector<Index>(perm.perm().begin(), perm.perm().end()) == std::vector<Index>{2, 0, 1});

  const auto diamond = compute_levels(SparsityPattern{4, {0, 0, 1, 2, 4}, {0, 0, 1, 2}}, LevelSource::lower_A);
  CHECK(build_level_permutation(partition_at(diamond, 3)) == Permutation::identity(4));
}

TEST_CASE("level statistics") {
  const auto s = level_stats(sized_levels({5, 3, 7}));
  CHECK(s.num_levels == 3);
  CHECK(s.min_rows == 3);
  CHECK(s.max_rows == 7);
  CHECK(s.median_rows == 5);
  const auto even = level_stats(sized_levels({1, 9, 4, 6}));
  CHECK(even.median_rows == 4);
  const auto single = level_stats(sized_levels({12}));
  CHECK((single.min_rows == 12 && single.max_rows == 12 && single.median_rows == 12));
}

TEST_CASE("reverse Cuthill-McKee") {
  // Path 0-1-2-3 stays consecutive.
  SparsityPattern path{4, {0, 2, 5, 8, 10}, {0, 1, 0, 1, 2, 1, 2, 3, 2, 3}};
  const auto pp = rcm_order(path);
  CHECK(bandwidth(permute_symmetric(path, pp)) == 1);

  const auto iso = rcm_order(SparsityPattern{2, {0, 1, 2}, {0, 1}});
  CHECK(std::vector<Index>(iso.perm().begin(), iso.perm().end()) == std::vector<Index>{1, 0});

  const auto grid = poisson2d(8).pattern();
  CHECK(bandwidth(permute_symmetric(grid, rcm_order(grid))) <= bandwidth(grid));

  // A scrambled grid gets its bandwidth back down.
  std::mt19937_64 rng(5);
  std::vector<Index> shuffle(64);
  for (Index i = 0; i < 64; ++i) shuffle[static_cast<std::size_t>(i)] = i;
  std::shuffle(shuffle.begin(), shuffle.end(), rng);
  const auto scrambled = permute_symmetric(grid, Permutation::from_new_to_old(shuffle));
  CHECK(bandwidth(permute_symmetric(scrambled, rcm_order(scrambled))) <= 10);
}
