#include "lsilu/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace lsilu {
namespace {

inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void precondition(const PreconditionerFn& m, std::span<const double> r, std::span<double> z) {
  if (m)
    m(r, z);
  else
    std::copy(r.begin(), r.end(), z.begin());
}

void check_system(const CsrMatrix& a, std::span<const double> b, double tol, Index maxit) {
  if (static_cast<Index>(b.size()) != a.n) throw_error(ErrorCode::size_mismatch, "right-hand side length differs from n");
  if (!(tol > 0.0)) throw_error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (maxit < 0) throw_error(ErrorCode::invalid_argument, "iteration limit must be non-negative");
}

double true_relative_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x, double bnorm) {
  std::vector<double> r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r) / bnorm;
}

}  // namespace

PreconditionerFn as_preconditioner(const IluPreconditioner& m) {
  return [&m](std::span<const double> r, std::span<double> z) { m.apply(r, z); };
}

KrylovResult pcg(const CsrMatrix& a, std::span<const double> b, const PreconditionerFn& m, double tol, Index maxit) {
  check_system(a, b, tol, maxit);
  const std::size_t n = b.size();
  KrylovResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.converged = true;
    res.residual_history.push_back(0.0);
    return res;
  }
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  precondition(m, r, z);
  p = z;
  double rz = dot(r, z);
  res.residual_history.push_back(1.0);
  while (res.iterations < maxit) {
    spmv(a, p, q);
    ++res.iterations;
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      res.breakdown = true;
      break;
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rel = norm2(r) / bnorm;
    res.residual_history.push_back(rel);
    if (rel <= tol) {
      res.converged = true;
      break;
    }
    precondition(m, r, z);
    const double rz_next = dot(r, z);
    if (rz == 0.0) {
      res.breakdown = true;
      break;
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.relative_residual = true_relative_residual(a, b, res.x, bnorm);
  return res;
}

KrylovResult gmres(const CsrMatrix& a, std::span<const double> b, const PreconditionerFn& m, Index restart,
                   double tol, Index maxit) {
  check_system(a, b, tol, maxit);
  if (restart < 1) throw_error(ErrorCode::invalid_argument, "restart length must be positive");
  const std::size_t n = b.size();
  const auto mr = sz(restart);
  KrylovResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.converged = true;
    res.residual_history.push_back(0.0);
    return res;
  }

  std::vector<std::vector<double>> v(mr + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(mr + 1, std::vector<double>(mr, 0.0));  // h[i][j]
  std::vector<double> cs(mr), sn(mr), g(mr + 1), w(n), z(n), r(b.begin(), b.end());
  double beta = bnorm;
  res.residual_history.push_back(1.0);

  while (true) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::size_t k = 0;  // columns built in this cycle
    bool stop = false;
    while (k < mr && res.iterations < maxit) {
      precondition(m, v[k], z);
      spmv(a, z, w);
      ++res.iterations;
      for (std::size_t i = 0; i <= k; ++i) {
        h[i][k] = dot(w, v[i]);
        for (std::size_t t = 0; t < n; ++t) w[t] -= h[i][k] * v[i][t];
      }
      const double hnext = norm2(w);
      for (std::size_t i = 0; i < k; ++i) {
        const double t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
        h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
        h[i][k] = t;
      }
      const double denom = std::hypot(h[k][k], hnext);
      if (denom == 0.0) {
        // A M^{-1} maps the direction to zero: no progress is possible.
        res.breakdown = true;
        stop = true;
        break;
      }
      cs[k] = h[k][k] / denom;
      sn[k] = hnext / denom;
      h[k][k] = denom;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++k;
      const double rel = std::abs(g[k]) / bnorm;
      res.residual_history.push_back(rel);
      if (rel <= tol) {
        res.converged = true;
        stop = true;
        break;
      }
      if (hnext == 0.0) {
        // Invariant subspace reached; the least-squares solution is exact.
        res.converged = true;
        stop = true;
        break;
      }
      for (std::size_t t = 0; t < n; ++t) v[k][t] = w[t] / hnext;
    }

    // Back substitution for y, then x += M^{-1} V y.
    std::vector<double> y(k);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < n; ++t) w[t] += y[j] * v[j][t];
    precondition(m, w, z);
    for (std::size_t t = 0; t < n; ++t) res.x[t] += z[t];

    if (stop || res.iterations >= maxit) break;
    r = spmv(a, res.x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    beta = norm2(r);
    if (beta / bnorm <= tol) {
      res.converged = true;
      break;
    }
  }
  res.relative_residual = true_relative_residual(a, b, res.x, bnorm);
  return res;
}

std::vector<OrderingOutcome> iteration_experiment(const CsrMatrix& a, std::span<const double> b,
                                                  std::span<const NamedOrdering> orderings, const IluOptions& options,
                                                  KrylovMethod method, double tol, Index maxit, Index restart) {
  if (static_cast<Index>(b.size()) != a.n) throw_error(ErrorCode::size_mismatch, "right-hand side length differs from n");
  std::vector<OrderingOutcome> out;
  WorkerPool pool(1);
  for (const auto& ordering : orderings) {
    OrderingOutcome o;
    o.name = ordering.name;
    try {
      const CsrMatrix ap = permute_symmetric(a, ordering.perm);
      std::vector<double> bp(b.size());
      for (Index i = 0; i < a.n; ++i) bp[sz(i)] = b[sz(ordering.perm.old_of(i))];
      IluOptions opt = options;
      opt.level_order = ordering.level_schedule;
      IluPreconditioner m(ap, opt, pool);
      m.factor();
      const auto fn = as_preconditioner(m);
      const KrylovResult r =
          method == KrylovMethod::pcg ? pcg(ap, bp, fn, tol, maxit) : gmres(ap, bp, fn, restart, tol, maxit);
      o.iterations = r.iterations;
      o.converged = r.converged;
    } catch (const Error& e) {
      o.failed = true;
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace lsilu
