#pragma once

// Independent reference implementations used as test oracles. They work on
// dense storage or plain graph searches and share no code with the library
// kernels they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "lsilu/generators.hpp"
#include "lsilu/preconditioner.hpp"
#include "lsilu/ordering.hpp"
#include "lsilu/sparse.hpp"
#include "lsilu/symbolic.hpp"
#include "lsilu/sync_schedule.hpp"

namespace oracle {

using lsilu::CsrMatrix;
using lsilu::Index;
using lsilu::SparsityPattern;
using Dense = std::vector<std::vector<double>>;
using Mask = std::vector<std::vector<bool>>;

inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

inline Dense to_dense(const CsrMatrix& a) {
  Dense d(sz(a.n), std::vector<double>(sz(a.n), 0.0));
  for (Index r = 0; r < a.n; ++r)
    for (Index p = a.row_start[sz(r)]; p < a.row_start[sz(r) + 1]; ++p) d[sz(r)][sz(a.col[sz(p)])] = a.val[sz(p)];
  return d;
}

inline Mask to_mask(const SparsityPattern& s) {
  Mask m(sz(s.n), std::vector<bool>(sz(s.n), false));
  for (Index r = 0; r < s.n; ++r)
    for (Index c : s.row(r)) m[sz(r)][sz(c)] = true;
  return m;
}

inline SparsityPattern from_mask(const Mask& m) {
  SparsityPattern s;
  s.n = static_cast<Index>(m.size());
  s.row_start.assign(m.size() + 1, 0);
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m.size(); ++c)
      if (m[r][c]) s.col.push_back(static_cast<Index>(c));
    s.row_start[r + 1] = static_cast<Index>(s.col.size());
  }
  return s;
}

inline CsrMatrix from_dense(const Dense& d) {
  CsrMatrix a;
  a.n = static_cast<Index>(d.size());
  a.row_start.assign(d.size() + 1, 0);
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t c = 0; c < d.size(); ++c)
      if (d[r][c] != 0.0) {
        a.col.push_back(static_cast<Index>(c));
        a.val.push_back(d[r][c]);
      }
    a.row_start[r + 1] = static_cast<Index>(a.col.size());
  }
  return a;
}

// Doolittle LU without pivoting; L has a unit diagonal and is stored below it.
inline Dense dense_lu(Dense a) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k] == 0.0) continue;
      a[i][k] /= a[k][k];
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= a[i][k] * a[k][j];
    }
  return a;
}

// Pattern-restricted elimination in k-i-j order. Updates outside `keep`
// are discarded, or moved onto the diagonal when `milu` is set.
inline Dense dense_ilu(Dense a, const Mask& keep, bool milu) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i) {
      if (!keep[i][k]) continue;
      a[i][k] /= a[k][k];
      for (std::size_t j = k + 1; j < n; ++j) {
        if (!keep[k][j]) continue;
        const double u = a[i][k] * a[k][j];
        if (keep[i][j])
          a[i][j] -= u;
        else if (milu)
          a[i][i] -= u;
      }
    }
  return a;
}

// Product L * U of a combined dense factor.
inline Dense multiply_lu(const Dense& f) {
  const std::size_t n = f.size();
  Dense p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) {
        const double l = k == i ? 1.0 : f[i][k];
        s += l * f[k][j];
      }
      p[i][j] = s;
    }
  return p;
}

inline Dense factors_to_dense(const lsilu::IluFactors& f) {
  Dense d(sz(f.n), std::vector<double>(sz(f.n), 0.0));
  for (Index r = 0; r < f.n; ++r)
    for (Index p = f.pattern.row_begin(r); p < f.pattern.row_end(r); ++p)
      d[sz(r)][sz(f.pattern.col[sz(p)])] = f.val[sz(p)];
  return d;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Dense a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

inline std::vector<double> dense_matvec(const Dense& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  const double scale = std::max(max_abs(b), std::numeric_limits<double>::min());
  return diff / scale;
}

// Longest path depth by memoized recursion over predecessors.
inline std::vector<Index> longest_path_depth(const SparsityPattern& lower) {
  std::vector<Index> depth(sz(lower.n), -1);
  std::function<Index(Index)> visit = [&](Index r) -> Index {
    if (depth[sz(r)] >= 0) return depth[sz(r)];
    Index d = 0;
    for (Index c : lower.row(r)) d = std::max(d, visit(c) + 1);
    return depth[sz(r)] = d;
  };
  for (Index r = 0; r < lower.n; ++r) visit(r);
  return depth;
}

// Random strictly lower pattern with about `per_row` entries in each row.
inline SparsityPattern random_lower(Index n, double per_row, std::mt19937_64& rng) {
  Mask m(sz(n), std::vector<bool>(sz(n), false));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Index r = 1; r < n; ++r)
    for (Index c = 0; c < r; ++c)
      if (coin(rng) < per_row / static_cast<double>(r)) m[sz(r)][sz(c)] = true;
  return from_mask(m);
}

// Fill level of every position as the shortest fill path minus one: a path
// i -> v1 -> ... -> j along stored entries whose interior vertices are all
// below min(i, j). Positions without such a path get -1.
inline std::vector<std::vector<int>> fill_path_levels(const SparsityPattern& a) {
  const Index n = a.n;
  std::vector<std::vector<int>> lev(sz(n), std::vector<int>(sz(n), -1));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index bound = std::min(i, j);
      // BFS from i over interior vertices < bound.
      std::vector<int> dist(sz(n), -1);
      std::deque<Index> queue;
      dist[sz(i)] = 0;
      queue.push_back(i);
      int best = -1;
      while (!queue.empty() && best < 0) {
        const Index v = queue.front();
        queue.pop_front();
        for (Index w : a.row(v)) {
          if (w == j) {
            best = dist[sz(v)] + 1;
            break;
          }
          if (w < bound && dist[sz(w)] < 0) {
            dist[sz(w)] = dist[sz(v)] + 1;
            queue.push_back(w);
          }
        }
      }
      if (i == j) best = 1;
      lev[sz(i)][sz(j)] = best < 0 ? -1 : best - 1;
    }
  }
  return lev;
}

// Happens-before check of a schedule: builds the graph of program-order and
// retained-wait edges and verifies, by breadth-first reachability, that
// every structural dependency c of r reaches r.
inline bool schedule_covers(const lsilu::SyncSchedule& s, const SparsityPattern& deps) {
  const Index n = s.n;
  std::vector<std::vector<Index>> succ(sz(n));
  for (const auto& order : s.program_order)
    for (std::size_t k = 1; k < order.size(); ++k) succ[sz(order[k - 1])].push_back(order[k]);
  for (Index r = 0; r < n; ++r)
    if (s.owner[sz(r)] >= 0)
      for (Index c : s.waits(r)) succ[sz(c)].push_back(r);
  for (Index r = 0; r < n; ++r) {
    if (s.owner[sz(r)] < 0) continue;
    for (Index c : deps.row(r)) {
      if (c == r || s.owner[sz(c)] < 0) continue;
      std::vector<bool> seen(sz(n), false);
      std::vector<Index> stack{c};
      seen[sz(c)] = true;
      bool found = false;
      while (!stack.empty() && !found) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index w : succ[sz(v)]) {
          if (w == r) found = true;
          if (!seen[sz(w)]) {
            seen[sz(w)] = true;
            stack.push_back(w);
          }
        }
      }
      if (!found) return false;
    }
  }
  return true;
}

// Discrete-event run of a schedule with random task durations. Each worker
// starts its next row once the previous one is done and every retained wait
// has completed. Returns false if a row would start before one of its
// structural predecessors has completed.
inline bool simulate_schedule(const lsilu::SyncSchedule& s, const SparsityPattern& deps, std::mt19937_64& rng) {
  const Index n = s.n;
  std::uniform_real_distribution<double> duration(0.1, 10.0);
  std::vector<double> finish(sz(n), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> next(s.program_order.size(), 0);
  std::vector<double> worker_free(s.program_order.size(), 0.0);
  std::size_t remaining = 0;
  for (const auto& o : s.program_order) remaining += o.size();
  while (remaining > 0) {
    // Pick the startable row with the earliest start time.
    int best_w = -1;
    double best_start = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < s.program_order.size(); ++w) {
      if (next[w] >= s.program_order[w].size()) continue;
      const Index r = s.program_order[w][next[w]];
      double start = worker_free[w];
      bool ready = true;
      for (Index c : s.waits(r)) {
        if (std::isinf(finish[sz(c)])) {
          ready = false;
          break;
        }
        start = std::max(start, finish[sz(c)]);
      }
      if (ready && start < best_start) {
        best_start = start;
        best_w = static_cast<int>(w);
      }
    }
    if (best_w < 0) return false;  // deadlock
    const auto w = static_cast<std::size_t>(best_w);
    const Index r = s.program_order[w][next[w]];
    for (Index c : deps.row(r)) {
      if (c == r || s.owner[sz(c)] < 0) continue;
      if (!(finish[sz(c)] <= best_start)) return false;
    }
    finish[sz(r)] = best_start + duration(rng);
    worker_free[w] = finish[sz(r)];
    ++next[w];
    --remaining;
  }
  return true;
}

}  // namespace oracle

namespace fixture {

using lsilu::Index;

// Partition whose trailing levels hold at least `lower_fraction` of the rows.
inline lsilu::StagePartition trailing_partition(const lsilu::CsrMatrix& a, lsilu::LevelSource source,
                                                double lower_fraction) {
  const auto levels = lsilu::compute_levels(lsilu::level_dependency_pattern(a.pattern(), source), source);
  Index cut = levels.num_levels();
  Index lower = 0;
  while (cut > 1 && static_cast<double>(lower) < lower_fraction * a.n) {
    --cut;
    lower += static_cast<Index>(levels.levels[static_cast<std::size_t>(cut)].size());
  }
  return lsilu::partition_at(levels, cut);
}

// Serially factored preconditioner used as the reference for parallel runs.
inline std::vector<double> serial_values(const lsilu::CsrMatrix& a, const lsilu::IluOptions& opt,
                                         const std::optional<lsilu::StagePartition>& part) {
  lsilu::WorkerPool pool(1);
  lsilu::IluOptions o = opt;
  o.lower = lsilu::LowerMethod::none;
  lsilu::IluPreconditioner m(a, o, pool, part);
  m.factor_serial();
  return m.factors().val;
}

}  // namespace fixture
