#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lsilu/preconditioner.hpp"
#include "lsilu/sparse.hpp"

namespace lsilu {

// z = M^{-1} r. An empty function means no preconditioning.
using PreconditionerFn = std::function<void(std::span<const double> r, std::span<double> z)>;

PreconditionerFn as_preconditioner(const IluPreconditioner& m);

struct KrylovResult {
  std::vector<double> x;
  // Matrix-vector products performed, the initial residual excluded.
  Index iterations = 0;
  bool converged = false;
  bool breakdown = false;
  // Relative residual ||b - A x|| / ||b|| after every iteration, starting with the initial guess.
  std::vector<double> residual_history;
  double relative_residual = 0.0;
};

// Preconditioned conjugate gradients from x = 0. Stops once the recursively
// updated residual satisfies ||r|| / ||b|| <= tol, or after maxit products.
// A non-positive curvature p^T A p ends the run with breakdown set.
KrylovResult pcg(const CsrMatrix& a, std::span<const double> b, const PreconditionerFn& m, double tol, Index maxit);

// Right-preconditioned restarted GMRES(restart) from x = 0 with modified
// Gram-Schmidt and Givens rotations. A zero Krylov direction ends the run
// and counts as convergence when the residual meets tol.
KrylovResult gmres(const CsrMatrix& a, std::span<const double> b, const PreconditionerFn& m, Index restart,
                   double tol, Index maxit);

enum class KrylovMethod { pcg, gmres };

struct NamedOrdering {
  std::string name;
  Permutation perm;  // applied to A before any level scheduling
  bool level_schedule = false;
};

struct OrderingOutcome {
  std::string name;
  Index iterations = 0;
  bool converged = false;
  bool failed = false;  // factorization or solve raised an error
  std::string error;
};

// For every ordering: permute A and b, build an ILU preconditioner (in the
// level ordering for level_schedule entries, else in the given order),
// factor it and count Krylov iterations.
std::vector<OrderingOutcome> iteration_experiment(const CsrMatrix& a, std::span<const double> b,
                                                  std::span<const NamedOrdering> orderings, const IluOptions& options,
                                                  KrylovMethod method, double tol, Index maxit, Index restart = 50);

}  // namespace lsilu
