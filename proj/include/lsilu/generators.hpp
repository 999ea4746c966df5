#pragma once

#include <cstdint>
#include <string>

#include "lsilu/sparse.hpp"

namespace lsilu {

// 5-point Laplacian on a k x k grid, natural ordering: 4 on the diagonal, -1 off it.
CsrMatrix poisson2d(Index k);

// 27-point stencil on a k x k x k grid: 26 on the diagonal, -1 for each neighbour.
CsrMatrix poisson3d(Index k);

// Upwind convection-diffusion on a k x k grid. The wind field is drawn from
// `seed`, so the matrix is unsymmetric but row diagonally dominant.
CsrMatrix convdiff2d(Index k, std::uint64_t seed);

// [-1, 2, -1] on n rows.
CsrMatrix tridiag(Index n);

// Random pattern with the diagonal set to exceed each row's absolute off-diagonal sum.
CsrMatrix random_diagonally_dominant(Index n, double density, std::uint64_t seed, bool symmetric_pattern = false);

// Dispatches on "poisson2d", "poisson3d", "convdiff2d" or "tridiag".
CsrMatrix generate_matrix(const std::string& kind, Index size, std::uint64_t seed);

}  // namespace lsilu
