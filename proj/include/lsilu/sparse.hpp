#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <span>
#include <vector>

#include "lsilu/error.hpp"

namespace lsilu {

// Square CSR sparsity structure. Column indices in each row are strictly
// increasing and lie in [0, n).
struct SparsityPattern {
  Index n = 0;
  std::vector<Index> row_start{0};
  std::vector<Index> col;

  Index nnz() const noexcept { return static_cast<Index>(col.size()); }
  Index row_begin(Index r) const { return row_start[static_cast<std::size_t>(r)]; }
  Index row_end(Index r) const { return row_start[static_cast<std::size_t>(r) + 1]; }
  Index row_nnz(Index r) const { return row_end(r) - row_begin(r); }
  std::span<const Index> row(Index r) const {
    return std::span<const Index>(col).subspan(static_cast<std::size_t>(row_begin(r)),
                                               static_cast<std::size_t>(row_nnz(r)));
  }
  // Position of (r, c) or -1.
  Index find(Index r, Index c) const;

  // Throws invalid_argument describing the first violated structural invariant.
  void validate() const;

  friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;
};

struct CsrMatrix {
  Index n = 0;
  std::vector<Index> row_start{0};
  std::vector<Index> col;
  std::vector<double> val;

  Index nnz() const noexcept { return static_cast<Index>(col.size()); }
  Index row_begin(Index r) const { return row_start[static_cast<std::size_t>(r)]; }
  Index row_end(Index r) const { return row_start[static_cast<std::size_t>(r) + 1]; }

  SparsityPattern pattern() const { return {n, row_start, col}; }
  void validate() const;

  static CsrMatrix identity(Index n);

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

// perm is new -> old, inv is old -> new.
class Permutation {
 public:
  Permutation() = default;
  static Permutation identity(Index n);
  // Throws invalid_argument unless new_to_old is a bijection on [0, n).
  static Permutation from_new_to_old(std::vector<Index> new_to_old);

  Index size() const noexcept { return static_cast<Index>(perm_.size()); }
  std::span<const Index> perm() const noexcept { return perm_; }
  std::span<const Index> inv() const noexcept { return inv_; }
  Index old_of(Index new_index) const { return perm_[static_cast<std::size_t>(new_index)]; }
  Index new_of(Index old_index) const { return inv_[static_cast<std::size_t>(old_index)]; }

  Permutation inverse() const;
  // Apply `this` first, then `next`: result.perm[i] = perm[next.perm[i]].
  Permutation then(const Permutation& next) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Index> perm_;
  std::vector<Index> inv_;
};

// Builds a matrix from unsorted coordinate triplets; duplicates are summed.
CsrMatrix csr_from_triplets(Index n, std::span<const Index> rows, std::span<const Index> cols,
                            std::span<const double> vals);

CsrMatrix transpose(const CsrMatrix& a);
SparsityPattern transpose(const SparsityPattern& a);
SparsityPattern symmetrize_pattern(const SparsityPattern& a);
// Strict lower triangle (col < row).
SparsityPattern lower_pattern(const SparsityPattern& a);
// Strict upper triangle (col > row).
SparsityPattern upper_pattern(const SparsityPattern& a);

// B[inv[i], inv[j]] = A[i, j].
CsrMatrix permute_symmetric(const CsrMatrix& a, const Permutation& p);
SparsityPattern permute_symmetric(const SparsityPattern& a, const Permutation& p);

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

bool is_pattern_symmetric(const SparsityPattern& a);
bool is_numerically_symmetric(const CsrMatrix& a);
// Half bandwidth max |i - j| over stored entries.
Index bandwidth(const SparsityPattern& a);

// Matrix Market coordinate format; real or integer values; general,
// symmetric or skew-symmetric storage. Symmetric storage is expanded.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market_file(const std::string& path);
void write_matrix_market(const CsrMatrix& a, std::ostream& out);
void write_matrix_market_file(const CsrMatrix& a, const std::string& path);

// One 0-based index per line; line k holds perm[k] (new -> old).
Permutation read_permutation(std::istream& in, Index expected_size);
Permutation read_permutation_file(const std::string& path, Index expected_size);
void write_permutation(const Permutation& p, std::ostream& out);

}  // namespace lsilu
