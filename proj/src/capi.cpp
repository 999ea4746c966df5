#include "lsilu/lsilu.h"

#include <algorithm>
#include <memory>
#include <new>
#include <string>

#include "lsilu/generators.hpp"
#include "lsilu/preconditioner.hpp"
#include "lsilu/solvers.hpp"

struct lsilu_matrix {
  lsilu::CsrMatrix a;
};

struct lsilu_precond {
  std::unique_ptr<lsilu::WorkerPool> pool;
  std::unique_ptr<lsilu::IluPreconditioner> m;
  lsilu::Index n = 0;
};

namespace {

using lsilu::Index;

thread_local std::string last_message;
thread_local int32_t last_row = -1;

lsilu_status fail(lsilu_status s, const char* what, int32_t row = -1) {
  last_message = what;
  last_row = row;
  return s;
}

lsilu_status status_of(lsilu::ErrorCode c) {
  switch (c) {
    case lsilu::ErrorCode::invalid_argument: return LSILU_INVALID_ARGUMENT;
    case lsilu::ErrorCode::parse_error: return LSILU_PARSE_ERROR;
    case lsilu::ErrorCode::io_error: return LSILU_IO_ERROR;
    case lsilu::ErrorCode::size_mismatch: return LSILU_SIZE_MISMATCH;
    case lsilu::ErrorCode::missing_diagonal: return LSILU_MISSING_DIAGONAL;
    case lsilu::ErrorCode::zero_pivot: return LSILU_ZERO_PIVOT;
    case lsilu::ErrorCode::sr_requires_symmetrized_levels: return LSILU_SR_REQUIRES_SYMMETRIZED_LEVELS;
    case lsilu::ErrorCode::sr_dependency_violation: return LSILU_SR_DEPENDENCY_VIOLATION;
  }
  return LSILU_INTERNAL_ERROR;
}

// Runs fn and converts any exception into a status.
template <typename Fn>
lsilu_status guarded(Fn&& fn) {
  try {
    fn();
    return LSILU_OK;
  } catch (const lsilu::Error& e) {
    return fail(status_of(e.code()), e.what(), e.row());
  } catch (const std::bad_alloc&) {
    return fail(LSILU_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(LSILU_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(LSILU_INTERNAL_ERROR, "unknown error");
  }
}

#define LSILU_REQUIRE(cond)                                                     \
  do {                                                                          \
    if (!(cond)) return fail(LSILU_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

lsilu::IluOptions to_options(const lsilu_options& o) {
  lsilu::IluOptions r;
  if (o.levels_on != LSILU_LEVELS_A && o.levels_on != LSILU_LEVELS_APLUSAT)
    lsilu::throw_error(lsilu::ErrorCode::invalid_argument, "unknown levels_on value");
  r.levels_on = o.levels_on == LSILU_LEVELS_A ? lsilu::LevelSource::lower_A : lsilu::LevelSource::lower_AplusAT;
  r.partition.min_level_rows = o.min_level_rows;
  r.partition.density_factor = o.density_factor;
  r.partition.suffix_only = o.suffix_only != 0;
  r.fill_level = o.fill_level;
  r.drop_tol = o.drop_tol;
  r.milu = o.milu != 0;
  switch (o.lower) {
    case LSILU_LOWER_AUTO: r.lower = lsilu::LowerMethod::automatic; break;
    case LSILU_LOWER_NONE: r.lower = lsilu::LowerMethod::none; break;
    case LSILU_LOWER_SR: r.lower = lsilu::LowerMethod::sr; break;
    case LSILU_LOWER_ER: r.lower = lsilu::LowerMethod::er; break;
    default: lsilu::throw_error(lsilu::ErrorCode::invalid_argument, "unknown lower method");
  }
  r.selection.er_rows_per_thread = o.er_rows_per_thread;
  r.selection.max_imbalance = o.max_imbalance;
  r.tile_size = o.tile_size;
  r.parallel_corner = o.parallel_corner != 0;
  r.level_order = o.level_order != 0;
  if (o.apply_path < LSILU_PATH_SERIAL || o.apply_path > LSILU_PATH_LS_LOWER)
    lsilu::throw_error(lsilu::ErrorCode::invalid_argument, "unknown solve path");
  r.apply_path = static_cast<lsilu::SolvePath>(o.apply_path);
  return r;
}

int lower_code(lsilu::LowerMethod m) {
  switch (m) {
    case lsilu::LowerMethod::sr: return LSILU_LOWER_SR;
    case lsilu::LowerMethod::er: return LSILU_LOWER_ER;
    case lsilu::LowerMethod::automatic: return LSILU_LOWER_AUTO;
    default: return LSILU_LOWER_NONE;
  }
}

void write_result(const lsilu::KrylovResult& r, double* x, double* history, int32_t capacity,
                  lsilu_krylov_result* out) {
  std::copy(r.x.begin(), r.x.end(), x);
  const auto len = static_cast<int32_t>(r.residual_history.size());
  if (history != nullptr)
    std::copy_n(r.residual_history.begin(), std::min(len, std::max(capacity, 0)), history);
  out->iterations = r.iterations;
  out->converged = r.converged ? 1 : 0;
  out->breakdown = r.breakdown ? 1 : 0;
  out->relative_residual = r.relative_residual;
  out->history_length = len;
}

lsilu::PreconditionerFn precond_fn(const lsilu_precond* m) {
  return m == nullptr ? lsilu::PreconditionerFn{} : lsilu::as_preconditioner(*m->m);
}

}  // namespace

extern "C" {

const char* lsilu_version(void) { return "1.0.0"; }

const char* lsilu_status_string(lsilu_status s) {
  switch (s) {
    case LSILU_OK: return "ok";
    case LSILU_INVALID_ARGUMENT: return "invalid_argument";
    case LSILU_PARSE_ERROR: return "parse_error";
    case LSILU_IO_ERROR: return "io_error";
    case LSILU_SIZE_MISMATCH: return "size_mismatch";
    case LSILU_MISSING_DIAGONAL: return "missing_diagonal";
    case LSILU_ZERO_PIVOT: return "zero_pivot";
    case LSILU_SR_REQUIRES_SYMMETRIZED_LEVELS: return "sr_requires_symmetrized_levels";
    case LSILU_SR_DEPENDENCY_VIOLATION: return "sr_dependency_violation";
    case LSILU_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* lsilu_last_error(void) { return last_message.c_str(); }

int32_t lsilu_last_error_row(void) { return last_row; }

lsilu_status lsilu_matrix_read(const char* path, lsilu_matrix** out) {
  LSILU_REQUIRE(path != nullptr && out != nullptr);
  return guarded([&] { *out = new lsilu_matrix{lsilu::read_matrix_market_file(path)}; });
}

lsilu_status lsilu_matrix_write(const lsilu_matrix* a, const char* path) {
  LSILU_REQUIRE(a != nullptr && path != nullptr);
  return guarded([&] { lsilu::write_matrix_market_file(a->a, path); });
}

lsilu_status lsilu_matrix_generate(const char* kind, int32_t size, uint64_t seed, lsilu_matrix** out) {
  LSILU_REQUIRE(kind != nullptr && out != nullptr);
  return guarded([&] { *out = new lsilu_matrix{lsilu::generate_matrix(kind, size, seed)}; });
}

lsilu_status lsilu_matrix_from_csr(int32_t n, const int32_t* row_start, const int32_t* col, const double* val,
                                   lsilu_matrix** out) {
  LSILU_REQUIRE(n >= 0 && row_start != nullptr && out != nullptr);
  return guarded([&] {
    lsilu::CsrMatrix a;
    a.n = n;
    a.row_start.assign(row_start, row_start + n + 1);
    const auto nnz = static_cast<std::size_t>(std::max(a.row_start.back(), 0));
    if (nnz > 0 && (col == nullptr || val == nullptr))
      lsilu::throw_error(lsilu::ErrorCode::invalid_argument, "column and value arrays are required");
    if (nnz > 0) {
      a.col.assign(col, col + nnz);
      a.val.assign(val, val + nnz);
    }
    a.validate();
    *out = new lsilu_matrix{std::move(a)};
  });
}

void lsilu_matrix_free(lsilu_matrix* a) { delete a; }

int32_t lsilu_matrix_rows(const lsilu_matrix* a) { return a == nullptr ? 0 : a->a.n; }

int32_t lsilu_matrix_nnz(const lsilu_matrix* a) { return a == nullptr ? 0 : static_cast<int32_t>(a->a.col.size()); }

lsilu_status lsilu_matrix_bandwidth(const lsilu_matrix* a, int32_t* out) {
  LSILU_REQUIRE(a != nullptr && out != nullptr);
  return guarded([&] { *out = lsilu::bandwidth(a->a.pattern()); });
}

lsilu_status lsilu_matrix_is_symmetric(const lsilu_matrix* a, int* out) {
  LSILU_REQUIRE(a != nullptr && out != nullptr);
  return guarded([&] { *out = lsilu::is_numerically_symmetric(a->a) ? 1 : 0; });
}

lsilu_status lsilu_matrix_spmv(const lsilu_matrix* a, const double* x, double* y) {
  LSILU_REQUIRE(a != nullptr && x != nullptr && y != nullptr);
  const auto n = static_cast<std::size_t>(a->a.n);
  return guarded([&] { lsilu::spmv(a->a, std::span<const double>(x, n), std::span<double>(y, n)); });
}

lsilu_status lsilu_matrix_permute(const lsilu_matrix* a, const int32_t* perm, lsilu_matrix** out) {
  LSILU_REQUIRE(a != nullptr && perm != nullptr && out != nullptr);
  return guarded([&] {
    const auto p = lsilu::Permutation::from_new_to_old(std::vector<Index>(perm, perm + a->a.n));
    *out = new lsilu_matrix{lsilu::permute_symmetric(a->a, p)};
  });
}

lsilu_status lsilu_read_permutation(const char* path, int32_t n, int32_t* perm) {
  LSILU_REQUIRE(path != nullptr && perm != nullptr && n >= 0);
  return guarded([&] {
    const auto p = lsilu::read_permutation_file(path, n);
    std::copy(p.perm().begin(), p.perm().end(), perm);
  });
}

lsilu_status lsilu_rcm_order(const lsilu_matrix* a, int32_t* perm) {
  LSILU_REQUIRE(a != nullptr && perm != nullptr);
  return guarded([&] {
    const auto p = lsilu::rcm_order(a->a.pattern());
    std::copy(p.perm().begin(), p.perm().end(), perm);
  });
}

void lsilu_options_default(lsilu_options* opt) {
  if (opt == nullptr) return;
  const lsilu::IluOptions d;
  opt->levels_on = LSILU_LEVELS_APLUSAT;
  opt->min_level_rows = d.partition.min_level_rows;
  opt->density_factor = d.partition.density_factor;
  opt->suffix_only = d.partition.suffix_only ? 1 : 0;
  opt->fill_level = d.fill_level;
  opt->drop_tol = d.drop_tol;
  opt->milu = d.milu ? 1 : 0;
  opt->lower = LSILU_LOWER_AUTO;
  opt->er_rows_per_thread = d.selection.er_rows_per_thread;
  opt->max_imbalance = d.selection.max_imbalance;
  opt->tile_size = d.tile_size;
  opt->parallel_corner = d.parallel_corner ? 1 : 0;
  opt->level_order = d.level_order ? 1 : 0;
  opt->apply_path = static_cast<int>(d.apply_path);
}

lsilu_status lsilu_precond_create(const lsilu_matrix* a, const lsilu_options* opt, int nthreads, lsilu_precond** out) {
  LSILU_REQUIRE(a != nullptr && out != nullptr && nthreads >= 1);
  return guarded([&] {
    lsilu_options defaults;
    lsilu_options_default(&defaults);
    auto m = std::make_unique<lsilu_precond>();
    m->pool = std::make_unique<lsilu::WorkerPool>(nthreads);
    m->m = std::make_unique<lsilu::IluPreconditioner>(a->a, to_options(opt ? *opt : defaults), *m->pool);
    m->n = a->a.n;
    *out = m.release();
  });
}

void lsilu_precond_free(lsilu_precond* m) { delete m; }

lsilu_status lsilu_precond_reset(lsilu_precond* m) {
  LSILU_REQUIRE(m != nullptr);
  return guarded([&] { m->m->reset_values(); });
}

lsilu_status lsilu_precond_factor(lsilu_precond* m) {
  LSILU_REQUIRE(m != nullptr);
  return guarded([&] { m->m->factor(); });
}

lsilu_status lsilu_precond_factor_serial(lsilu_precond* m) {
  LSILU_REQUIRE(m != nullptr);
  return guarded([&] { m->m->factor_serial(); });
}

lsilu_status lsilu_precond_digest(const lsilu_precond* m, uint64_t* out) {
  LSILU_REQUIRE(m != nullptr && out != nullptr);
  return guarded([&] { *out = m->m->digest(); });
}

lsilu_status lsilu_precond_stats(const lsilu_precond* m, lsilu_stats* out) {
  LSILU_REQUIRE(m != nullptr && out != nullptr);
  return guarded([&] {
    const lsilu::SetupStats& s = m->m->stats();
    out->n = s.n;
    out->nnz = s.nnz;
    out->factor_nnz = s.factor_nnz;
    out->num_levels = s.levels.num_levels;
    out->min_level_rows = s.levels.min_rows;
    out->max_level_rows = s.levels.max_rows;
    out->median_level_rows = s.levels.median_rows;
    out->upper_rows = s.upper_rows;
    out->lower_rows = s.lower_rows;
    out->lower_method = lower_code(s.method);
    out->fell_back_to_er = s.fell_back_to_er ? 1 : 0;
    out->lower_imbalance = s.lower_imbalance;
    out->dependencies = s.dependencies;
    out->cross_worker_dependencies = s.cross_worker_dependencies;
    out->retained_waits = s.retained_waits;
    out->tiles = s.tiles;
    out->parallel_corner = s.parallel_corner ? 1 : 0;
  });
}

lsilu_status lsilu_precond_permutation(const lsilu_precond* m, int32_t* perm) {
  LSILU_REQUIRE(m != nullptr && perm != nullptr);
  return guarded([&] {
    const auto p = m->m->permutation().perm();
    std::copy(p.begin(), p.end(), perm);
  });
}

lsilu_status lsilu_precond_solve(const lsilu_precond* m, int path, int which, const double* b, double* x) {
  LSILU_REQUIRE(m != nullptr && b != nullptr && x != nullptr);
  LSILU_REQUIRE(path >= LSILU_PATH_SERIAL && path <= LSILU_PATH_LS_LOWER);
  LSILU_REQUIRE(which == LSILU_FORWARD || which == LSILU_BACKWARD);
  return guarded([&] {
    const auto n = static_cast<std::size_t>(m->n);
    const auto out = m->m->solve(std::span<const double>(b, n),
                                 which == LSILU_FORWARD ? lsilu::Triangle::forward : lsilu::Triangle::backward,
                                 static_cast<lsilu::SolvePath>(path));
    std::copy(out.begin(), out.end(), x);
  });
}

lsilu_status lsilu_precond_apply(const lsilu_precond* m, const double* r, double* z) {
  LSILU_REQUIRE(m != nullptr && r != nullptr && z != nullptr);
  const auto n = static_cast<std::size_t>(m->n);
  return guarded([&] { m->m->apply(std::span<const double>(r, n), std::span<double>(z, n)); });
}

lsilu_status lsilu_pcg(const lsilu_matrix* a, const double* b, const lsilu_precond* m, double tol, int32_t maxit,
                       double* x, double* history, int32_t history_capacity, lsilu_krylov_result* result) {
  LSILU_REQUIRE(a != nullptr && b != nullptr && x != nullptr && result != nullptr);
  LSILU_REQUIRE(m == nullptr || m->n == a->a.n);
  return guarded([&] {
    const auto r = lsilu::pcg(a->a, std::span<const double>(b, static_cast<std::size_t>(a->a.n)), precond_fn(m), tol,
                              maxit);
    write_result(r, x, history, history_capacity, result);
  });
}

lsilu_status lsilu_gmres(const lsilu_matrix* a, const double* b, const lsilu_precond* m, int32_t restart, double tol,
                         int32_t maxit, double* x, double* history, int32_t history_capacity,
                         lsilu_krylov_result* result) {
  LSILU_REQUIRE(a != nullptr && b != nullptr && x != nullptr && result != nullptr);
  LSILU_REQUIRE(m == nullptr || m->n == a->a.n);
  return guarded([&] {
    const auto r = lsilu::gmres(a->a, std::span<const double>(b, static_cast<std::size_t>(a->a.n)), precond_fn(m),
                                restart, tol, maxit);
    write_result(r, x, history, history_capacity, result);
  });
}

}  // extern "C"
