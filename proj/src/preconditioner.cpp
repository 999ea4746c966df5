#include "lsilu/preconditioner.hpp"

#include "lsilu/factor_upper.hpp"
#include "row_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace lsilu {
namespace {

inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

std::vector<Index> row_nnz(const SparsityPattern& p) {
  std::vector<Index> out(sz(p.n));
  for (Index r = 0; r < p.n; ++r) out[sz(r)] = p.row_nnz(r);
  return out;
}

}  // namespace

const char* to_string(SolvePath p) noexcept {
  switch (p) {
    case SolvePath::serial: return "serial";
    case SolvePath::csrls: return "csrls";
    case SolvePath::ls: return "ls";
    case SolvePath::ls_lower: return "ls_lower";
  }
  return "unknown";
}

void IluOptions::validate() const {
  partition.validate();
  if (fill_level < 0) throw_error(ErrorCode::invalid_argument, "fill level must be non-negative");
  if (!(drop_tol >= 0.0) || !std::isfinite(drop_tol))
    throw_error(ErrorCode::invalid_argument, "drop tolerance must be a finite non-negative number");
  if (tile_size < 1) throw_error(ErrorCode::invalid_argument, "tile size must be positive");
  if (selection.er_rows_per_thread < 0.0 || selection.max_imbalance < 0.0)
    throw_error(ErrorCode::invalid_argument, "selection thresholds must be non-negative");
  if (lower == LowerMethod::sr && levels_on != LevelSource::lower_AplusAT)
    throw_error(ErrorCode::sr_requires_symmetrized_levels,
                "segmented rows needs levels computed on lower(A + A^T)");
}

IluPreconditioner::IluPreconditioner(const CsrMatrix& a, const IluOptions& options, WorkerPool& pool,
                                     std::optional<StagePartition> partition)
    : opt_(options), pool_(&pool) {
  opt_.validate();
  a.validate();
  const int p = pool.size();
  const Index n = a.n;
  const SparsityPattern ap = a.pattern();

  Permutation perm;
  StagePartition part;
  if (opt_.level_order) {
    levels_ = compute_levels(level_dependency_pattern(ap, opt_.levels_on), opt_.levels_on);
    if (partition) {
      part = std::move(*partition);
      if (part.upper_row_count() + part.lower_row_count() != n)
        throw_error(ErrorCode::size_mismatch, "forced partition does not cover the matrix");
    } else {
      part = partition_stages(levels_, row_nnz(ap), opt_.partition);
    }
    perm = build_level_permutation(part);
  } else {
    perm = Permutation::identity(n);
  }

  const SparsityPattern permuted = permute_symmetric(ap, perm);
  SparsityPattern pattern =
      opt_.fill_level > 0 ? iluk_pattern(permuted, opt_.fill_level).first : ilu0_pattern(permuted);

  std::vector<std::vector<Index>> upper_levels;
  if (opt_.level_order) {
    layout_ = stage_layout(part, n);
    upper_levels = layout_.upper_level_rows();
  } else {
    // Levels of the factor itself; rows of a level are not contiguous here.
    levels_ = compute_levels(lower_pattern(pattern), LevelSource::lower_A);
    layout_.n = n;
    layout_.upper_rows = n;
    layout_.level_ptr = {0, n};
    layout_.source = LevelSource::lower_A;
    upper_levels = levels_.levels;
  }

  upper_ = build_sync_schedule(upper_levels, lower_pattern(pattern), p);

  // Rows are written during assembly by the worker that factors them.
  std::vector<int> owner(sz(n), 0);
  for (Index r = 0; r < n; ++r) owner[sz(r)] = std::max(upper_.owner[sz(r)], 0);
  const Index lower_rows = layout_.lower_rows();
  for (Index k = 0; k < lower_rows; ++k)
    owner[sz(layout_.upper_rows + k)] = static_cast<int>(static_cast<long long>(k) * p / lower_rows);

  f_ = assemble_factors(a, pattern, perm, opt_.drop_tol, opt_.milu, &pool, owner);
  initial_ = f_.val;

  stats_.n = n;
  stats_.nnz = static_cast<Index>(a.col.size());
  stats_.factor_nnz = f_.pattern.nnz();
  stats_.levels = level_stats(levels_);
  stats_.upper_rows = layout_.upper_rows;
  stats_.lower_rows = layout_.lower_rows();
  stats_.dependencies = upper_.dependency_count;
  stats_.cross_worker_dependencies = upper_.cross_worker_count;
  stats_.retained_waits = upper_.retained_waits();

  LowerMethod method = LowerMethod::none;
  if (layout_.lower_rows() > 0) {
    stats_.lower_imbalance = lower_row_imbalance(f_, layout_);
    method = opt_.lower == LowerMethod::automatic
                 ? select_lower_method(layout_.lower_rows(), p, stats_.lower_imbalance, opt_.selection)
                 : opt_.lower;
    if (method == LowerMethod::sr) {
      try {
        tiles_ = build_tiles(f_, layout_, opt_.tile_size);
      } catch (const Error& e) {
        const bool structural =
            e.code() == ErrorCode::sr_requires_symmetrized_levels || e.code() == ErrorCode::sr_dependency_violation;
        if (opt_.lower != LowerMethod::automatic || !structural) throw;
        method = LowerMethod::er;
        stats_.fell_back_to_er = true;
      }
    }
    if (method == LowerMethod::er) chunks_ = build_er_chunks(f_, layout_, p);
    if (method != LowerMethod::none && opt_.parallel_corner && corner_worth_parallel(layout_, p)) {
      corner_ = build_corner_schedule(f_, layout_, p);
      stats_.parallel_corner = true;
    }
  }
  stats_.method = method;
  if (tiles_) stats_.tiles = tiles_->total_tiles();

  forward_levels_ = forward_solve_levels(f_);
  backward_levels_ = backward_solve_levels(f_);
  forward_ = forward_solve_schedule(f_, p);
  backward_ = backward_solve_schedule(f_, p);
  lower_plan_ = build_lower_solve_plan(f_, layout_, method, tiles_ ? &*tiles_ : nullptr,
                                       chunks_ ? &*chunks_ : nullptr, p);
  flags_.resize(n);
}

void IluPreconditioner::reset_values() {
  pool_->parallel_for(static_cast<Index>(initial_.size()), [&](Index b, Index e, int) {
    std::copy(initial_.begin() + b, initial_.begin() + e, f_.val.begin() + b);
  });
}

void IluPreconditioner::factor() {
  factor_parallel_upper(f_, upper_, *pool_, flags_);
  const SyncSchedule* corner = corner_ ? &*corner_ : nullptr;
  switch (stats_.method) {
    case LowerMethod::sr: factor_sr(f_, layout_, *tiles_, *pool_, flags_, corner); break;
    case LowerMethod::er: factor_er(f_, layout_, *chunks_, *pool_, flags_, corner); break;
    default: {
      // A forced partition with no lower method: finish those rows in order.
      const detail::FactorView view(f_);
      std::vector<Index> rows;
      for (Index r = layout_.upper_rows; r < f_.n; ++r) {
        detail::eliminate_row(view, r, 0, r);
        rows.push_back(r);
      }
      check_pivots(f_, rows);
      break;
    }
  }
}

void IluPreconditioner::factor_serial() { lsilu::factor_serial(f_); }

std::vector<double> IluPreconditioner::solve(std::span<const double> b, Triangle which, SolvePath path) const {
  switch (path) {
    case SolvePath::serial: return solve_serial(f_, b, which);
    case SolvePath::csrls:
      return solve_baseline_csrls(f_, b, which == Triangle::forward ? forward_levels_ : backward_levels_, *pool_,
                                  which);
    case SolvePath::ls:
      return solve_ls(f_, b, which == Triangle::forward ? forward_ : backward_, *pool_, flags_, which);
    case SolvePath::ls_lower: return solve_ls_lower(f_, b, lower_plan_, *pool_, flags_, which);
  }
  throw_error(ErrorCode::invalid_argument, "unknown solve path");
}

void IluPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const Index n = f_.n;
  if (static_cast<Index>(r.size()) != n || static_cast<Index>(z.size()) != n)
    throw_error(ErrorCode::size_mismatch, "vector length differs from n");
  std::vector<double> rp(sz(n));
  for (Index i = 0; i < n; ++i) rp[sz(i)] = r[sz(f_.perm.old_of(i))];
  const auto y = solve(rp, Triangle::forward, opt_.apply_path);
  const auto x = solve(y, Triangle::backward, opt_.apply_path);
  for (Index i = 0; i < n; ++i) z[sz(f_.perm.old_of(i))] = x[sz(i)];
}

std::vector<double> IluPreconditioner::apply(std::span<const double> r) const {
  std::vector<double> z(r.size());
  apply(r, z);
  return z;
}

}  // namespace lsilu
