#include <doctest.h>

#include "lsilu/factor_lower.hpp"
#include "lsilu/factor_upper.hpp"
#include "support.hpp"

using namespace lsilu;

namespace {

IluFactors factors_of(const CsrMatrix& a, double tau = 0.0, bool milu = false) {
  return assemble_factors(a, a.pattern(), Permutation::identity(a.n), tau, milu);
}

CsrMatrix dense_matrix(const oracle::Dense& d) { return oracle::from_dense(d); }

std::vector<double> parallel_values(const CsrMatrix& a, IluOptions opt, LowerMethod method, int p,
                                    const std::optional<StagePartition>& part) {
  WorkerPool pool(p);
  opt.lower = method;
  IluPreconditioner m(a, opt, pool, part);
  m.factor();
  return m.factors().val;
}

}  // namespace

TEST_CASE("serial factorization of small matrices") {
  auto id = factors_of(CsrMatrix::identity(3));
  factor_serial(id);
  CHECK(id.val == std::vector<double>{1, 1, 1});

  auto f = factors_of(dense_matrix({{4, 2}, {1, 3}}));
  factor_serial(f);
  CHECK(f.val == std::vector<double>{4, 2, 0.25, 2.5});
  const auto lu = oracle::dense_lu({{4, 2}, {1, 3}});
  CHECK(lu[1][0] == 0.25);
  CHECK(lu[1][1] == 2.5);

  auto g = factors_of(dense_matrix({{2, 0, 1}, {1, 2, 0}, {0, 1, 2}}));
  factor_serial(g);
  const auto d = oracle::factors_to_dense(g);
  CHECK(d[1][0] == 0.5);
  CHECK(d[2][1] == 0.5);
  CHECK(d[2][2] == 2.0);
  CHECK(oracle::dense_lu({{2, 0, 1}, {1, 2, 0}, {0, 1, 2}})[2][2] == 2.25);
}

TEST_CASE("serial factorization matches pattern-restricted dense elimination") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = random_diagonally_dominant(60, 0.06, seed);
    for (bool milu : {false, true}) {
      auto f = factors_of(a, 0.0, milu);
      factor_serial(f);
      const auto expect = oracle::dense_ilu(oracle::to_dense(a), oracle::to_mask(a.pattern()), milu);
      const auto got = oracle::factors_to_dense(f);
      for (std::size_t i = 0; i < got.size(); ++i)
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[i][j] == doctest::Approx(expect[i][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tridiagonal ILU(0) equals dense LU") {
  const auto a = tridiag(32);
  auto f = factors_of(a);
  factor_serial(f);
  const auto lu = oracle::dense_lu(oracle::to_dense(a));
  const auto got = oracle::factors_to_dense(f);
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) CHECK(std::abs(got[i][j] - lu[i][j]) <= 1e-14 * std::abs(lu[i][j]));
}

TEST_CASE("zero pivots are reported with the row") {
  auto f = factors_of(dense_matrix({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
  try {
    factor_serial(f);
    FAIL("expected zero pivot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_pivot);
    CHECK(e.row() == 1);
  }
}

TEST_CASE("drop tolerance zeroes small multipliers") {
  const auto a = dense_matrix({{10, 0, 1}, {0.001, 10, 0}, {1, 1, 10}});
  auto f = factors_of(a, 0.005, false);
  factor_serial(f);
  const auto d = oracle::factors_to_dense(f);
  CHECK(d[1][0] == 0.0);
  CHECK(d[2][0] == 0.1);

  auto g = factors_of(a, 0.005, true);
  factor_serial(g);
  // The dropped value moves onto the diagonal.
  CHECK(oracle::factors_to_dense(g)[1][1] == 10.0 + 0.001);
}

TEST_CASE("sync schedule small cases") {
  SparsityPattern deps{2, {0, 0, 1}, {0}};
  const std::vector<std::vector<Index>> levels{{0}, {1}};
  const auto s = build_sync_schedule(levels, deps, 2);
  CHECK(s.owner == std::vector<int>{0, 1});
  CHECK(std::vector<Index>(s.waits(1).begin(), s.waits(1).end()) == std::vector<Index>{0});

  const auto one = build_sync_schedule(levels, deps, 1);
  CHECK(one.retained_waits() == 0);
  CHECK_THROWS_AS(build_sync_schedule(levels, deps, 0), Error);
}

TEST_CASE("pruned schedules keep every dependency ordered") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 120; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 200);
    const auto lower = oracle::random_lower(n, 1.0 + static_cast<double>(rng() % 3), rng);
    const auto levels = compute_levels(lower, LevelSource::lower_A);
    const int p = 1 + static_cast<int>(rng() % 8);
    const auto s = build_sync_schedule(levels.levels, lower, p);
    CHECK(oracle::schedule_covers(s, lower));
    CHECK(oracle::simulate_schedule(s, lower, rng));
    CHECK(s.retained_waits() <= s.cross_worker_count);
    // No retained wait names a row the same worker already ran.
    for (Index r = 0; r < n; ++r)
      for (Index c : s.waits(r)) CHECK(s.owner[static_cast<std::size_t>(c)] != s.owner[static_cast<std::size_t>(r)]);
  }
}

TEST_CASE("point-to-point upper factorization is bitwise serial") {
  auto check = [](const CsrMatrix& a) {
    auto ref = factors_of(a);
    factor_serial(ref);
    const auto levels = compute_levels(lower_pattern(a.pattern()), LevelSource::lower_A);
    for (int p : {1, 2, 4, 8}) {
      auto f = factors_of(a);
      WorkerPool pool(p);
      CompletionFlags flags;
      const auto s = build_factor_schedule(f, levels.levels, p);
      factor_parallel_upper(f, s, pool, flags);
      CHECK(f.val == ref.val);
    }
  };
  check(poisson2d(16));
  for (std::uint64_t seed = 0; seed < 50; ++seed) check(random_diagonally_dominant(150, 0.03, 500 + seed));
}

TEST_CASE("tiles split subblocks greedily") {
  // One upper level {0..9}, every lower row touches all ten columns: one subblock of 10 entries per row.
  const Index n = 11;
  oracle::Dense d(11, std::vector<double>(11, 0.0));
  for (std::size_t i = 0; i < 11; ++i) d[i][i] = 20;
  for (std::size_t c = 0; c < 10; ++c) d[10][c] = d[c][10] = 1;
  const auto a = oracle::from_dense(d);
  const auto levels = compute_levels(level_dependency_pattern(a.pattern(), LevelSource::lower_AplusAT),
                                     LevelSource::lower_AplusAT);
  const auto part = partition_at(levels, 1);
  const auto layout = stage_layout(part, n);
  const auto perm = build_level_permutation(part);
  const auto f = assemble_factors(a, permute_symmetric(a.pattern(), perm), perm, 0, false);
  const auto t = build_tiles(f, layout, 4);
  REQUIRE(t.tiles.size() == 2);
  std::vector<Index> sizes;
  for (const auto& tile : t.tiles[0]) sizes.push_back(tile.end - tile.begin);
  CHECK(sizes == std::vector<Index>{4, 4, 2});
  CHECK(t.tiles[1].size() == 1);

  StageLayout no_lower = stage_layout(partition_at(levels, 2), n);
  const auto empty = build_tiles(f, no_lower, 4);
  for (const auto& tiles : empty.tiles) CHECK(tiles.empty());
}

TEST_CASE("tiles partition every subblock of a generated matrix") {
  const auto a = poisson3d(8);
  const auto part = fixture::trailing_partition(a, LevelSource::lower_AplusAT, 0.3);
  const auto perm = build_level_permutation(part);
  const auto f = assemble_factors(a, permute_symmetric(a.pattern(), perm), perm, 0, false);
  const auto layout = stage_layout(part, a.n);
  for (Index size : {1, 7, 64, 256}) {
    const auto t = build_tiles(f, layout, size);
    for (std::size_t s = 0; s < t.subblocks.size(); ++s) {
      Index covered = 0;
      for (const auto& tile : t.tiles[s]) {
        CHECK(tile.begin == covered);
        CHECK(tile.end - tile.begin <= size);
        covered = tile.end;
      }
      CHECK(covered == t.subblocks[s].entries());
      // Columns of a level subblock stay inside that level.
      for (Index k = 0; k < layout.lower_rows(); ++k)
        for (Index q = 0; q < t.subblocks[s].row_entries(k); ++q) {
          const Index c = f.pattern.col[static_cast<std::size_t>(t.subblocks[s].seg_begin[static_cast<std::size_t>(k)] + q)];
          CHECK(c >= t.subblocks[s].col_begin);
          CHECK(c < t.subblocks[s].col_end);
        }
    }
  }
}

TEST_CASE("segmented rows rejects levels computed on A") {
  const auto a = random_diagonally_dominant(50, 0.05, 1);
  const auto part = fixture::trailing_partition(a, LevelSource::lower_A, 0.3);
  const auto perm = build_level_permutation(part);
  const auto f = assemble_factors(a, permute_symmetric(a.pattern(), perm), perm, 0, false);
  try {
    build_tiles(f, stage_layout(part, a.n), 16);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sr_requires_symmetrized_levels);
  }
  IluOptions opt;
  opt.levels_on = LevelSource::lower_A;
  opt.lower = LowerMethod::sr;
  WorkerPool pool(2);
  CHECK_THROWS_AS(IluPreconditioner(a, opt, pool), Error);
}

TEST_CASE("intra-level dependencies are detected") {
  StageLayout layout;
  layout.n = 3;
  layout.upper_rows = 2;
  layout.level_ptr = {0, 2};
  const auto a = dense_matrix({{4, 1, 0}, {1, 4, 1}, {0, 1, 4}});
  const auto f = factors_of(a);
  try {
    check_intra_level_independence(f, layout);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sr_dependency_violation);
    CHECK(e.row() == 0);
  }
}

TEST_CASE("lower method selection") {
  CHECK(select_lower_method(0, 8, 1.0) == LowerMethod::none);
  CHECK(select_lower_method(500, 8, 1.2) == LowerMethod::er);
  CHECK(select_lower_method(10, 64, 40) == LowerMethod::sr);
  CHECK(select_lower_method(16, 8, 8.0) == LowerMethod::er);
  CHECK(select_lower_method(16, 8, 8.5) == LowerMethod::sr);
  CHECK(select_lower_method(15, 8, 1.0) == LowerMethod::sr);
}

TEST_CASE("three-row example with its last row in the lower stage") {
  const auto a = dense_matrix({{2, 0, 1}, {1, 2, 0}, {0, 1, 2}});
  const auto levels = compute_levels(level_dependency_pattern(a.pattern(), LevelSource::lower_AplusAT),
                                     LevelSource::lower_AplusAT);
  REQUIRE(levels.num_levels() == 3);
  const auto part = partition_at(levels, 2);
  const auto ref = fixture::serial_values(a, {}, part);
  for (LowerMethod m : {LowerMethod::sr, LowerMethod::er})
    for (int p : {1, 2}) CHECK(parallel_values(a, {}, m, p, part) == ref);
}

TEST_CASE("segmented and even rows are bitwise serial") {
  IluOptions plain;
  IluOptions milu;
  milu.milu = true;
  IluOptions dropping;
  dropping.drop_tol = 0.05;
  dropping.milu = true;
  IluOptions small_tiles;
  small_tiles.tile_size = 3;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto a = random_diagonally_dominant(200, 0.02, 900 + seed, seed % 2 == 0);
    const auto part = fixture::trailing_partition(a, LevelSource::lower_AplusAT, 0.25);
    for (const IluOptions& opt : {plain, milu, dropping, small_tiles}) {
      const auto ref = fixture::serial_values(a, opt, part);
      for (int p : {1, 2, 4, 8}) {
        CHECK(parallel_values(a, opt, LowerMethod::sr, p, part) == ref);
        CHECK(parallel_values(a, opt, LowerMethod::er, p, part) == ref);
      }
    }
  }
}

TEST_CASE("even rows with fill and a parallel corner") {
  IluOptions opt;
  opt.fill_level = 1;
  opt.parallel_corner = true;
  const auto a = random_diagonally_dominant(300, 0.01, 4242);
  const auto part = fixture::trailing_partition(a, LevelSource::lower_AplusAT, 0.3);
  const auto ref = fixture::serial_values(a, opt, part);
  for (int p : {2, 4, 8}) {
    WorkerPool pool(p);
    opt.lower = LowerMethod::er;
    IluPreconditioner m(a, opt, pool, part);
    CHECK(m.stats().parallel_corner);
    m.factor();
    CHECK(m.factors().val == ref);
  }
}

TEST_CASE("segmented rows with a parallel corner") {
  IluOptions opt;
  opt.parallel_corner = true;
  const auto a = poisson3d(7);
  const auto part = fixture::trailing_partition(a, LevelSource::lower_AplusAT, 0.4);
  const auto ref = fixture::serial_values(a, opt, part);
  for (int p : {2, 4}) CHECK(parallel_values(a, opt, LowerMethod::sr, p, part) == ref);
}

TEST_CASE("automatic selection falls back to even rows when levels come from A") {
  IluOptions opt;
  opt.levels_on = LevelSource::lower_A;
  const auto a = random_diagonally_dominant(120, 0.03, 31);
  const auto part = fixture::trailing_partition(a, LevelSource::lower_A, 0.3);
  opt.selection.er_rows_per_thread = 1e9;  // the rule alone would pick segmented rows
  WorkerPool pool(2);
  IluPreconditioner m(a, opt, pool, part);
  CHECK(m.stats().method == LowerMethod::er);
  CHECK(m.stats().fell_back_to_er);
  m.factor();
  CHECK(m.factors().val == fixture::serial_values(a, opt, part));
}

TEST_CASE("MILU keeps row sums") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = seed == 0 ? poisson2d(6) : random_diagonally_dominant(40, 0.08, 70 + seed);
    auto f = factors_of(a, 0.0, true);
    factor_serial(f);
    const auto lu = oracle::multiply_lu(oracle::factors_to_dense(f));
    const auto dense = oracle::to_dense(a);
    const auto milu_oracle = oracle::multiply_lu(oracle::dense_ilu(dense, oracle::to_mask(a.pattern()), true));
    for (std::size_t i = 0; i < dense.size(); ++i) {
      double row_a = 0, row_lu = 0, row_oracle = 0, scale = 0;
      for (std::size_t j = 0; j < dense.size(); ++j) {
        row_a += dense[i][j];
        row_lu += lu[i][j];
        row_oracle += milu_oracle[i][j];
        scale += std::abs(dense[i][j]);
      }
      CHECK(std::abs(row_lu - row_a) <= 1e-12 * scale);
      CHECK(std::abs(row_lu - row_oracle) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("a forced lower stage without a lower method is finished in order") {
  const auto a = random_diagonally_dominant(150, 0.03, 606, true);
  const auto part = fixture::trailing_partition(a, LevelSource::lower_AplusAT, 0.3);
  const auto ref = fixture::serial_values(a, {}, part);
  for (int p : {1, 3}) {
    WorkerPool pool(p);
    IluOptions opt;
    opt.lower = LowerMethod::none;
    IluPreconditioner m(a, opt, pool, part);
    REQUIRE(m.stats().lower_rows > 0);
    m.factor();
    CHECK(m.factors().val == ref);
  }
}
