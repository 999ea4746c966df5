#include "lsilu/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <string>

namespace lsilu {
namespace {

using std::size_t;

inline size_t sz(Index i) { return static_cast<size_t>(i); }

void validate_structure(Index n, const std::vector<Index>& row_start, const std::vector<Index>& col) {
  if (n < 0) throw_error(ErrorCode::invalid_argument, "negative dimension");
  if (row_start.size() != sz(n) + 1)
    throw_error(ErrorCode::invalid_argument, "row_start must hold n+1 offsets");
  if (row_start.front() != 0) throw_error(ErrorCode::invalid_argument, "row_start[0] must be 0");
  if (row_start.back() != static_cast<Index>(col.size()))
    throw_error(ErrorCode::invalid_argument, "row_start[n] must equal nnz");
  for (Index r = 0; r < n; ++r) {
    const Index b = row_start[sz(r)];
    const Index e = row_start[sz(r) + 1];
    if (e < b) throw_error(ErrorCode::invalid_argument, "row_start decreases at row " + std::to_string(r), r);
    for (Index p = b; p < e; ++p) {
      const Index c = col[sz(p)];
      if (c < 0 || c >= n)
        throw_error(ErrorCode::invalid_argument, "column out of range in row " + std::to_string(r), r);
      if (p > b && col[sz(p) - 1] >= c)
        throw_error(ErrorCode::invalid_argument, "columns not strictly increasing in row " + std::to_string(r), r);
    }
  }
}

// Counting-sort transpose shared by the pattern and value versions.
template <bool WithValues>
void transpose_into(Index n, const std::vector<Index>& rs, const std::vector<Index>& col,
                    const std::vector<double>* val, std::vector<Index>& out_rs,
                    std::vector<Index>& out_col, std::vector<double>* out_val) {
  out_rs.assign(sz(n) + 1, 0);
  for (Index c : col) ++out_rs[sz(c) + 1];
  std::partial_sum(out_rs.begin(), out_rs.end(), out_rs.begin());
  out_col.resize(col.size());
  if constexpr (WithValues) out_val->resize(col.size());
  std::vector<Index> next(out_rs.begin(), out_rs.end() - 1);
  for (Index r = 0; r < n; ++r) {
    for (Index p = rs[sz(r)]; p < rs[sz(r) + 1]; ++p) {
      const Index dst = next[sz(col[sz(p)])]++;
      out_col[sz(dst)] = r;
      if constexpr (WithValues) (*out_val)[sz(dst)] = (*val)[sz(p)];
    }
  }
}

template <typename Keep>
SparsityPattern filter_pattern(const SparsityPattern& a, Keep keep) {
  SparsityPattern out;
  out.n = a.n;
  out.row_start.assign(sz(a.n) + 1, 0);
  for (Index r = 0; r < a.n; ++r) {
    for (Index c : a.row(r)) {
      if (keep(r, c)) out.col.push_back(c);
    }
    out.row_start[sz(r) + 1] = out.nnz();
  }
  return out;
}

}  // namespace

Index SparsityPattern::find(Index r, Index c) const {
  const auto first = col.begin() + row_begin(r);
  const auto last = col.begin() + row_end(r);
  const auto it = std::lower_bound(first, last, c);
  return (it != last && *it == c) ? static_cast<Index>(it - col.begin()) : -1;
}

void SparsityPattern::validate() const { validate_structure(n, row_start, col); }

void CsrMatrix::validate() const {
  validate_structure(n, row_start, col);
  if (val.size() != col.size()) throw_error(ErrorCode::invalid_argument, "val and col lengths differ");
}

CsrMatrix CsrMatrix::identity(Index n) {
  CsrMatrix m;
  m.n = n;
  m.row_start.resize(sz(n) + 1);
  std::iota(m.row_start.begin(), m.row_start.end(), 0);
  m.col.resize(sz(n));
  std::iota(m.col.begin(), m.col.end(), 0);
  m.val.assign(sz(n), 1.0);
  return m;
}

Permutation Permutation::identity(Index n) {
  std::vector<Index> p(sz(n));
  std::iota(p.begin(), p.end(), 0);
  return from_new_to_old(std::move(p));
}

Permutation Permutation::from_new_to_old(std::vector<Index> new_to_old) {
  Permutation p;
  const auto n = new_to_old.size();
  p.inv_.assign(n, -1);
  for (size_t i = 0; i < n; ++i) {
    const Index old = new_to_old[i];
    if (old < 0 || sz(old) >= n) throw_error(ErrorCode::invalid_argument, "permutation index out of range");
    if (p.inv_[sz(old)] != -1)
      throw_error(ErrorCode::invalid_argument, "permutation repeats index " + std::to_string(old));
    p.inv_[sz(old)] = static_cast<Index>(i);
  }
  p.perm_ = std::move(new_to_old);
  return p;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.perm_ = inv_;
  p.inv_ = perm_;
  return p;
}

Permutation Permutation::then(const Permutation& next) const {
  if (next.size() != size()) throw_error(ErrorCode::size_mismatch, "permutation sizes differ");
  std::vector<Index> composed(perm_.size());
  for (size_t i = 0; i < composed.size(); ++i) composed[i] = perm_[sz(next.perm_[i])];
  return from_new_to_old(std::move(composed));
}

CsrMatrix csr_from_triplets(Index n, std::span<const Index> rows, std::span<const Index> cols,
                            std::span<const double> vals) {
  if (rows.size() != cols.size() || rows.size() != vals.size())
    throw_error(ErrorCode::size_mismatch, "triplet arrays differ in length");
  std::vector<size_t> order(rows.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return rows[x] != rows[y] ? rows[x] < rows[y] : cols[x] < cols[y];
  });
  CsrMatrix m;
  m.n = n;
  m.row_start.assign(sz(n) + 1, 0);
  for (size_t k = 0; k < order.size(); ++k) {
    const size_t t = order[k];
    const Index r = rows[t];
    const Index c = cols[t];
    if (r < 0 || r >= n || c < 0 || c >= n) throw_error(ErrorCode::invalid_argument, "triplet index out of range");
    if (k > 0 && rows[order[k - 1]] == r && cols[order[k - 1]] == c) {
      m.val.back() += vals[t];
      continue;
    }
    m.col.push_back(c);
    m.val.push_back(vals[t]);
    ++m.row_start[sz(r) + 1];
  }
  std::partial_sum(m.row_start.begin(), m.row_start.end(), m.row_start.begin());
  return m;
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.n = a.n;
  transpose_into<true>(a.n, a.row_start, a.col, &a.val, t.row_start, t.col, &t.val);
  return t;
}

SparsityPattern transpose(const SparsityPattern& a) {
  SparsityPattern t;
  t.n = a.n;
  transpose_into<false>(a.n, a.row_start, a.col, nullptr, t.row_start, t.col, nullptr);
  return t;
}

SparsityPattern symmetrize_pattern(const SparsityPattern& a) {
  const SparsityPattern t = transpose(a);
  SparsityPattern out;
  out.n = a.n;
  out.row_start.assign(sz(a.n) + 1, 0);
  out.col.reserve(a.col.size() * 2);
  for (Index r = 0; r < a.n; ++r) {
    const auto x = a.row(r);
    const auto y = t.row(r);
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out.col));
    out.row_start[sz(r) + 1] = out.nnz();
  }
  return out;
}

SparsityPattern lower_pattern(const SparsityPattern& a) {
  return filter_pattern(a, [](Index r, Index c) { return c < r; });
}

SparsityPattern upper_pattern(const SparsityPattern& a) {
  return filter_pattern(a, [](Index r, Index c) { return c > r; });
}

CsrMatrix permute_symmetric(const CsrMatrix& a, const Permutation& p) {
  if (p.size() != a.n) throw_error(ErrorCode::size_mismatch, "permutation size does not match matrix");
  CsrMatrix b;
  b.n = a.n;
  b.row_start.assign(sz(a.n) + 1, 0);
  for (Index i = 0; i < a.n; ++i) {
    const Index old = p.old_of(i);
    b.row_start[sz(i) + 1] = b.row_start[sz(i)] + (a.row_end(old) - a.row_begin(old));
  }
  b.col.resize(a.col.size());
  b.val.resize(a.val.size());
  std::vector<std::pair<Index, double>> buf;
  for (Index i = 0; i < a.n; ++i) {
    const Index old = p.old_of(i);
    buf.clear();
    for (Index q = a.row_begin(old); q < a.row_end(old); ++q) buf.emplace_back(p.new_of(a.col[sz(q)]), a.val[sz(q)]);
    std::sort(buf.begin(), buf.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    Index dst = b.row_start[sz(i)];
    for (const auto& [c, v] : buf) {
      b.col[sz(dst)] = c;
      b.val[sz(dst)] = v;
      ++dst;
    }
  }
  return b;
}

SparsityPattern permute_symmetric(const SparsityPattern& a, const Permutation& p) {
  if (p.size() != a.n) throw_error(ErrorCode::size_mismatch, "permutation size does not match pattern");
  SparsityPattern b;
  b.n = a.n;
  b.row_start.assign(sz(a.n) + 1, 0);
  b.col.reserve(a.col.size());
  for (Index i = 0; i < a.n; ++i) {
    const Index old = p.old_of(i);
    const auto first = b.col.end() - b.col.begin();
    for (Index c : a.row(old)) b.col.push_back(p.new_of(c));
    std::sort(b.col.begin() + first, b.col.end());
    b.row_start[sz(i) + 1] = b.nnz();
  }
  return b;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != sz(a.n) || y.size() != sz(a.n)) throw_error(ErrorCode::size_mismatch, "spmv vector length mismatch");
  for (Index r = 0; r < a.n; ++r) {
    double s = 0.0;
    for (Index p = a.row_begin(r); p < a.row_end(r); ++p) s += a.val[sz(p)] * x[sz(a.col[sz(p)])];
    y[sz(r)] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(sz(a.n));
  spmv(a, x, y);
  return y;
}

bool is_pattern_symmetric(const SparsityPattern& a) { return transpose(a) == a; }

bool is_numerically_symmetric(const CsrMatrix& a) { return transpose(a) == a; }

Index bandwidth(const SparsityPattern& a) {
  Index bw = 0;
  for (Index r = 0; r < a.n; ++r)
    for (Index c : a.row(r)) bw = std::max(bw, static_cast<Index>(std::abs(r - c)));
  return bw;
}

}  // namespace lsilu
