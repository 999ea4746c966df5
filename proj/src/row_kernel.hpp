#pragma once

// Numeric kernels shared by every factorization path. All paths must issue
// the same floating-point operations in the same order per value, so the
// arithmetic lives here and nowhere else.

#include <algorithm>
#include <cmath>

#include "lsilu/symbolic.hpp"

namespace lsilu::detail {

struct FactorView {
  const Index* row_start;
  const Index* col;
  const Index* diag_pos;
  double* val;
  const double* row_norm;
  double drop_tol;
  bool milu;

  explicit FactorView(IluFactors& f)
      : row_start(f.pattern.row_start.data()),
        col(f.pattern.col.data()),
        diag_pos(f.diag_pos.data()),
        val(f.val.data()),
        row_norm(f.row_norm.data()),
        drop_tol(f.drop_tol),
        milu(f.milu) {}

  bool dropped(Index row, double l) const noexcept {
    return drop_tol > 0.0 && std::abs(l) < drop_tol * row_norm[row];
  }
};

// multiplier for the L entry at position p (column c).
inline double multiplier(const FactorView& f, Index p, Index c) noexcept { return f.val[p] / f.val[f.diag_pos[c]]; }

// Subtracts l * U(c, :) from row `row`, starting at position q0 (the first
// position after the L entry being eliminated). Updates to positions absent
// from the pattern are skipped, or folded into the diagonal under MILU.
inline void apply_row_update(const FactorView& f, Index row, Index q0, Index c, double l) noexcept {
  const Index end = f.row_start[row + 1];
  const Index d = f.diag_pos[row];
  Index q = q0;
  const Index u_end = f.row_start[c + 1];
  for (Index u = f.diag_pos[c] + 1; u < u_end; ++u) {
    const Index j = f.col[u];
    while (q < end && f.col[q] < j) ++q;
    if (q < end && f.col[q] == j) {
      f.val[q] -= l * f.val[u];
    } else if (f.milu) {
      f.val[d] -= l * f.val[u];
    } else if (q == end) {
      break;
    }
  }
}

// Up-looking elimination of `row` against its stored L entries whose column
// lies in [col_begin, col_end). Columns are visited in ascending order; the
// rows they name must already be final.
inline void eliminate_row(const FactorView& f, Index row, Index col_begin, Index col_end) noexcept {
  const Index d = f.diag_pos[row];
  Index p = f.row_start[row];
  if (col_begin > 0) p = static_cast<Index>(std::lower_bound(f.col + p, f.col + d, col_begin) - f.col);
  for (; p < d; ++p) {
    const Index c = f.col[p];
    if (c >= col_end) break;
    const double w = f.val[p];
    const double l = multiplier(f, p, c);
    if (f.dropped(row, l)) {
      f.val[p] = 0.0;
      if (f.milu) f.val[d] += w;
      continue;
    }
    f.val[p] = l;
    apply_row_update(f, row, p + 1, c, l);
  }
}

}  // namespace lsilu::detail
