#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsilu/sparse.hpp"

namespace lsilu {

class WorkerPool;

// L (strict lower, unit diagonal implied) and U (diagonal and upper) stored
// together row by row on one symbolic pattern, in the level ordering.
struct IluFactors {
  Index n = 0;
  SparsityPattern pattern;
  std::vector<double> val;
  std::vector<Index> diag_pos;
  Permutation perm;
  double drop_tol = 0.0;
  bool milu = false;
  // Infinity norm of each row's original values; scales the drop test.
  std::vector<double> row_norm;

  double diag(Index r) const { return val[static_cast<std::size_t>(diag_pos[static_cast<std::size_t>(r)])]; }
  // Positions [row_begin, diag) hold L, [diag, row_end) hold U.
  Index lower_begin(Index r) const { return pattern.row_begin(r); }
  Index lower_end(Index r) const { return diag_pos[static_cast<std::size_t>(r)]; }
  Index upper_begin(Index r) const { return diag_pos[static_cast<std::size_t>(r)] + 1; }
  Index upper_end(Index r) const { return pattern.row_end(r); }
};

// Level of fill per stored position; original entries are 0.
struct FillLevelTable {
  std::vector<int> level;
};

SparsityPattern ilu0_pattern(const SparsityPattern& a);

// Level-of-fill pattern: fill(i,j) = min over m < min(i,j) of fill(i,m) + fill(m,j) + 1, kept when <= k.
std::pair<SparsityPattern, FillLevelTable> iluk_pattern(const SparsityPattern& a, int k);

// Returns -1 when every row stores its diagonal, else the first row lacking it.
Index first_missing_diagonal(const SparsityPattern& a);

// Copies P A P^T into `pattern` (which must contain it); fill positions start at zero.
// `row_owner`, when non-empty, gives the worker that writes each new row;
// otherwise rows are split into contiguous chunks.
IluFactors assemble_factors(const CsrMatrix& a, const SparsityPattern& pattern, const Permutation& perm,
                            double drop_tol, bool milu, WorkerPool* pool = nullptr,
                            std::span<const int> row_owner = {});

// 64-bit FNV-1a over the raw bytes of the factor values.
std::uint64_t factor_digest(std::span<const double> values);

}  // namespace lsilu
