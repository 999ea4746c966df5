#include "lsilu/trisolve.hpp"

#include <algorithm>
#include <barrier>
#include <string>

namespace lsilu {
namespace {

inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

struct SolveView {
  const Index* row_start;
  const Index* col;
  const Index* diag_pos;
  const double* val;

  explicit SolveView(const IluFactors& f)
      : row_start(f.pattern.row_start.data()), col(f.pattern.col.data()), diag_pos(f.diag_pos.data()), val(f.val.data()) {}

  // y[r] = b[r] - sum of l_rc y_c over columns < r.
  void forward_row(Index r, const double* b, double* y) const noexcept {
    double acc = b[r];
    for (Index p = row_start[r]; p < diag_pos[r]; ++p) acc -= val[p] * y[col[p]];
    y[r] = acc;
  }
  // Continues an accumulation held in y[r] over L columns in [col_begin, col_end).
  void forward_partial(Index r, Index col_begin, Index col_end, double* y) const noexcept {
    const Index d = diag_pos[r];
    Index p = static_cast<Index>(std::lower_bound(col + row_start[r], col + d, col_begin) - col);
    double acc = y[r];
    for (; p < d && col[p] < col_end; ++p) acc -= val[p] * y[col[p]];
    y[r] = acc;
  }
  void backward_row(Index r, const double* y, double* x) const noexcept {
    const Index d = diag_pos[r];
    double acc = y[r];
    for (Index p = d + 1; p < row_start[r + 1]; ++p) acc -= val[p] * x[col[p]];
    x[r] = acc / val[d];
  }
  void row(Triangle which, Index r, const double* in, double* out) const noexcept {
    if (which == Triangle::forward)
      forward_row(r, in, out);
    else
      backward_row(r, in, out);
  }
};

void check_length(const IluFactors& f, std::span<const double> b) {
  if (static_cast<Index>(b.size()) != f.n) throw_error(ErrorCode::size_mismatch, "right-hand side length differs from n");
}

void check_backward_pivots(const IluFactors& f) {
  for (Index r = 0; r < f.n; ++r)
    if (f.diag(r) == 0.0) throw_error(ErrorCode::zero_pivot, "zero diagonal in row " + std::to_string(r), r);
}

void check_solve_inputs(const IluFactors& f, std::span<const double> b, Triangle which) {
  check_length(f, b);
  if (which == Triangle::backward) check_backward_pivots(f);
}

SparsityPattern reversed_upper(const SparsityPattern& p, Index limit) {
  // Row i' = limit-1-i lists limit-1-j for every j > i (j < limit) stored in row i.
  SparsityPattern r;
  r.n = limit;
  r.row_start.assign(sz(limit) + 1, 0);
  for (Index ip = 0; ip < limit; ++ip) {
    const Index i = limit - 1 - ip;
    const auto row = p.row(i);
    for (auto it = row.rbegin(); it != row.rend(); ++it)
      if (*it > i && *it < limit) r.col.push_back(limit - 1 - *it);
    r.row_start[sz(ip) + 1] = r.nnz();
  }
  return r;
}

LevelSchedule backward_levels_upto(const IluFactors& f, Index limit) {
  const LevelSchedule rev = compute_levels(reversed_upper(f.pattern, limit), LevelSource::lower_A);
  LevelSchedule s;
  s.source = rev.source;
  s.level_of.resize(sz(limit));
  for (Index ip = 0; ip < limit; ++ip) s.level_of[sz(limit - 1 - ip)] = rev.level_of[sz(ip)];
  s.levels.resize(rev.levels.size());
  for (std::size_t l = 0; l < rev.levels.size(); ++l) {
    for (Index ip : rev.levels[l]) s.levels[l].push_back(limit - 1 - ip);
    std::sort(s.levels[l].begin(), s.levels[l].end());
  }
  return s;
}

}  // namespace

const char* to_string(Triangle t) noexcept { return t == Triangle::forward ? "forward" : "backward"; }

std::vector<double> solve_serial(const IluFactors& f, std::span<const double> b, Triangle which) {
  check_solve_inputs(f, b, which);
  const SolveView v(f);
  std::vector<double> out(sz(f.n));
  if (which == Triangle::forward) {
    for (Index r = 0; r < f.n; ++r) v.forward_row(r, b.data(), out.data());
  } else {
    for (Index r = f.n - 1; r >= 0; --r) v.backward_row(r, b.data(), out.data());
  }
  return out;
}

LevelSchedule forward_solve_levels(const IluFactors& f) {
  return compute_levels(lower_pattern(f.pattern), LevelSource::lower_A);
}

LevelSchedule backward_solve_levels(const IluFactors& f) { return backward_levels_upto(f, f.n); }

std::vector<double> solve_baseline_csrls(const IluFactors& f, std::span<const double> b, const LevelSchedule& levels,
                                         WorkerPool& pool, Triangle which) {
  check_solve_inputs(f, b, which);
  if (static_cast<Index>(levels.level_of.size()) != f.n)
    throw_error(ErrorCode::size_mismatch, "level schedule was built for a different matrix");
  const SolveView v(f);
  std::vector<double> out(sz(f.n));
  const int p = pool.size();
  std::barrier sync(p);
  pool.run([&](int w) {
    for (const auto& level : levels.levels) {
      const auto count = level.size();
      const std::size_t lo = count * sz(w) / sz(p);
      const std::size_t hi = count * sz(w + 1) / sz(p);
      for (std::size_t k = lo; k < hi; ++k) v.row(which, level[k], b.data(), out.data());
      sync.arrive_and_wait();
    }
  });
  return out;
}

SyncSchedule forward_solve_schedule(const IluFactors& f, int nthreads) {
  return build_sync_schedule(forward_solve_levels(f).levels, lower_pattern(f.pattern), nthreads);
}

SyncSchedule backward_solve_schedule(const IluFactors& f, int nthreads) {
  return build_sync_schedule(backward_solve_levels(f).levels, upper_pattern(f.pattern), nthreads);
}

std::vector<double> solve_ls(const IluFactors& f, std::span<const double> b, const SyncSchedule& schedule,
                             WorkerPool& pool, CompletionFlags& flags, Triangle which) {
  check_solve_inputs(f, b, which);
  if (schedule.n != f.n) throw_error(ErrorCode::size_mismatch, "schedule was built for a different matrix");
  const SolveView v(f);
  std::vector<double> out(sz(f.n));
  run_point_to_point(pool, schedule, flags, [&](Index r) { v.row(which, r, b.data(), out.data()); });
  return out;
}

LowerSolvePlan build_lower_solve_plan(const IluFactors& f, const StageLayout& layout, LowerMethod method,
                                      const TileLayout* tiles, const ErChunks* chunks, int nthreads) {
  if (method == LowerMethod::automatic) throw_error(ErrorCode::invalid_argument, "lower method must be resolved");
  if (layout.n != f.n) throw_error(ErrorCode::size_mismatch, "layout was built for a different matrix");
  LowerSolvePlan plan;
  plan.layout = layout;
  plan.method = layout.lower_rows() == 0 ? LowerMethod::none : method;
  const Index nu = layout.upper_rows;

  const SparsityPattern lower = lower_pattern(f.pattern);
  plan.upper_forward = build_sync_schedule(layout.upper_level_rows(), lower, nthreads);

  LevelSchedule back = backward_levels_upto(f, nu);
  std::vector<std::vector<Index>> back_levels;
  for (auto& level : back.levels)
    if (!level.empty()) back_levels.push_back(std::move(level));
  plan.upper_backward = build_sync_schedule(back_levels, upper_pattern(f.pattern), nthreads);

  if (plan.method == LowerMethod::sr) {
    if (tiles == nullptr) throw_error(ErrorCode::invalid_argument, "segmented-rows solve needs a tile layout");
    plan.tiles = *tiles;
    for (Index i = 0; i < plan.tiles.corner(); ++i) {
      const auto& list = plan.tiles.tiles[sz(i)];
      const Index entries = plan.tiles.subblocks[sz(i)].entries();
      std::vector<TileChain> chains;
      for (Index t = 0; t < static_cast<Index>(list.size()); ++t) {
        if (!chains.empty() && list[sz(t)].first_row == list[sz(t - 1)].last_row) {
          chains.back().last_tile = t;
        } else {
          const auto owner = static_cast<int>(static_cast<long long>(list[sz(t)].begin) * nthreads / entries);
          chains.push_back({t, t, owner});
        }
      }
      plan.chains.push_back(std::move(chains));
    }
  } else if (plan.method == LowerMethod::er) {
    if (chunks == nullptr) throw_error(ErrorCode::invalid_argument, "even-rows solve needs row chunks");
    plan.chunks = *chunks;
  }
  return plan;
}

std::vector<double> solve_ls_lower(const IluFactors& f, std::span<const double> b, const LowerSolvePlan& plan,
                                   WorkerPool& pool, CompletionFlags& flags, Triangle which) {
  check_solve_inputs(f, b, which);
  if (plan.layout.n != f.n) throw_error(ErrorCode::size_mismatch, "plan was built for a different matrix");
  const SolveView v(f);
  const Index nu = plan.layout.upper_rows;
  const Index n = f.n;
  std::vector<double> out(sz(n));
  const double* in = b.data();
  double* y = out.data();

  if (which == Triangle::backward) {
    for (Index r = n - 1; r >= nu; --r) v.backward_row(r, in, y);
    run_point_to_point(pool, plan.upper_backward, flags, [&](Index r) { v.backward_row(r, in, y); });
    return out;
  }

  run_point_to_point(pool, plan.upper_forward, flags, [&](Index r) { v.forward_row(r, in, y); });
  if (nu == n) return out;
  std::copy(in + nu, in + n, y + nu);

  if (plan.method == LowerMethod::sr) {
    const TileLayout& tl = plan.tiles;
    const int p = pool.size();
    std::barrier sync(p);
    pool.run([&](int w) {
      for (Index i = 0; i < tl.corner(); ++i) {
        const Subblock& s = tl.subblocks[sz(i)];
        const auto& tiles = tl.tiles[sz(i)];
        for (const TileChain& chain : plan.chains[sz(i)]) {
          if (chain.owner != w) continue;
          // Rows of a chain are disjoint from every other chain's rows.
          const Index k_lo = tiles[sz(chain.first_tile)].first_row;
          const Index k_hi = tiles[sz(chain.last_tile)].last_row;
          for (Index k = k_lo; k <= k_hi; ++k) {
            if (s.row_entries(k) == 0) continue;
            const Index r = nu + k;
            double acc = y[r];
            const Index p0 = s.seg_begin[sz(k)];
            for (Index q = p0; q < p0 + s.row_entries(k); ++q) acc -= v.val[q] * y[v.col[q]];
            y[r] = acc;
          }
        }
        sync.arrive_and_wait();
      }
    });
  } else if (plan.method == LowerMethod::er) {
    if (plan.chunks.bounds.size() != sz(pool.size()) + 1)
      throw_error(ErrorCode::invalid_argument, "chunk count differs from the worker count");
    pool.run([&](int w) {
      for (Index k = plan.chunks.bounds[sz(w)]; k < plan.chunks.bounds[sz(w) + 1]; ++k)
        v.forward_partial(nu + k, 0, nu, y);
    });
  } else {
    for (Index r = nu; r < n; ++r) v.forward_partial(r, 0, nu, y);
  }
  for (Index r = nu; r < n; ++r) v.forward_partial(r, nu, r, y);
  return out;
}

}  // namespace lsilu
