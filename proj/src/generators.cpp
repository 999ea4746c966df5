#include "lsilu/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lsilu {
namespace {

struct Triplets {
  std::vector<Index> rows, cols;
  std::vector<double> vals;
  void add(Index r, Index c, double v) {
    rows.push_back(r);
    cols.push_back(c);
    vals.push_back(v);
  }
  CsrMatrix build(Index n) const { return csr_from_triplets(n, rows, cols, vals); }
};

void require_size(Index size, Index minimum = 2) {
  if (size < minimum) throw_error(ErrorCode::invalid_argument, "generator size must be at least " + std::to_string(minimum));
}

}  // namespace

CsrMatrix poisson2d(Index k) {
  require_size(k);
  const Index n = k * k;
  Triplets t;
  for (Index y = 0; y < k; ++y) {
    for (Index x = 0; x < k; ++x) {
      const Index i = y * k + x;
      if (y > 0) t.add(i, i - k, -1.0);
      if (x > 0) t.add(i, i - 1, -1.0);
      t.add(i, i, 4.0);
      if (x + 1 < k) t.add(i, i + 1, -1.0);
      if (y + 1 < k) t.add(i, i + k, -1.0);
    }
  }
  return t.build(n);
}

CsrMatrix poisson3d(Index k) {
  require_size(k);
  if (k > 1290) throw_error(ErrorCode::invalid_argument, "grid too large for 32-bit indices");
  const Index n = k * k * k;
  Triplets t;
  for (Index z = 0; z < k; ++z)
    for (Index y = 0; y < k; ++y)
      for (Index x = 0; x < k; ++x) {
        const Index i = (z * k + y) * k + x;
        for (Index dz = -1; dz <= 1; ++dz)
          for (Index dy = -1; dy <= 1; ++dy)
            for (Index dx = -1; dx <= 1; ++dx) {
              const Index zz = z + dz, yy = y + dy, xx = x + dx;
              if (zz < 0 || yy < 0 || xx < 0 || zz >= k || yy >= k || xx >= k) continue;
              const Index j = (zz * k + yy) * k + xx;
              t.add(i, j, i == j ? 26.0 : -1.0);
            }
      }
  return t.build(n);
}

CsrMatrix convdiff2d(Index k, std::uint64_t seed) {
  require_size(k);
  const Index n = k * k;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wind(-1.0, 1.0);
  const double h = 1.0 / static_cast<double>(k + 1);
  const double peclet = 20.0;
  const double bx = peclet * wind(rng), by = peclet * wind(rng);
  Triplets t;
  for (Index y = 0; y < k; ++y)
    for (Index x = 0; x < k; ++x) {
      const Index i = y * k + x;
      // Multiplied through by h^2: diffusion stencil plus first-order upwind convection.
      const double cx = bx * h, cy = by * h;
      const double diag = 4.0 + std::abs(cx) + std::abs(cy);
      const double west = -1.0 - std::max(cx, 0.0), east = -1.0 + std::min(cx, 0.0);
      const double south = -1.0 - std::max(cy, 0.0), north = -1.0 + std::min(cy, 0.0);
      if (y > 0) t.add(i, i - k, south);
      if (x > 0) t.add(i, i - 1, west);
      t.add(i, i, diag);
      if (x + 1 < k) t.add(i, i + 1, east);
      if (y + 1 < k) t.add(i, i + k, north);
    }
  return t.build(n);
}

CsrMatrix tridiag(Index n) {
  require_size(n);
  Triplets t;
  for (Index i = 0; i < n; ++i) {
    if (i > 0) t.add(i, i - 1, -1.0);
    t.add(i, i, 2.0);
    if (i + 1 < n) t.add(i, i + 1, -1.0);
  }
  return t.build(n);
}

CsrMatrix random_diagonally_dominant(Index n, double density, std::uint64_t seed, bool symmetric_pattern) {
  require_size(n, 1);
  if (!(density >= 0.0 && density <= 1.0)) throw_error(ErrorCode::invalid_argument, "density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  Triplets t;
  std::vector<double> offsum(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = symmetric_pattern ? i + 1 : 0; j < n; ++j) {
      if (i == j || coin(rng) >= density) continue;
      const double v = value(rng);
      t.add(i, j, v);
      offsum[static_cast<std::size_t>(i)] += std::abs(v);
      if (symmetric_pattern) {
        const double w = value(rng);
        t.add(j, i, w);
        offsum[static_cast<std::size_t>(j)] += std::abs(w);
      }
    }
  for (Index i = 0; i < n; ++i) t.add(i, i, offsum[static_cast<std::size_t>(i)] + 1.0 + coin(rng));
  return t.build(n);
}

CsrMatrix generate_matrix(const std::string& kind, Index size, std::uint64_t seed) {
  if (kind == "poisson2d") return poisson2d(size);
  if (kind == "poisson3d") return poisson3d(size);
  if (kind == "convdiff2d") return convdiff2d(size, seed);
  if (kind == "tridiag") return tridiag(size);
  throw_error(ErrorCode::invalid_argument, "unknown generator '" + kind + "'");
}

}  // namespace lsilu
