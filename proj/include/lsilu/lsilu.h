/* C interface to the lsilu parallel incomplete-LU toolkit.
 *
 * Every call that can fail returns an lsilu_status. On failure the
 * calling thread's last error message (and, for pivot and diagonal
 * errors, the offending row) can be read back until the next failing call.
 * Handles are opaque and owned by the caller; free them exactly once.
 * Indices are 0-based 32-bit integers. */
#ifndef LSILU_LSILU_H
#define LSILU_LSILU_H

#include <stdint.h>

#if defined(LSILU_BUILDING_LIBRARY)
#define LSILU_API __attribute__((visibility("default")))
#else
#define LSILU_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsilu_status {
  LSILU_OK = 0,
  LSILU_INVALID_ARGUMENT = 1,
  LSILU_PARSE_ERROR = 2,
  LSILU_IO_ERROR = 3,
  LSILU_SIZE_MISMATCH = 4,
  LSILU_MISSING_DIAGONAL = 5,
  LSILU_ZERO_PIVOT = 6,
  LSILU_SR_REQUIRES_SYMMETRIZED_LEVELS = 7,
  LSILU_SR_DEPENDENCY_VIOLATION = 8,
  LSILU_INTERNAL_ERROR = 99
} lsilu_status;

typedef struct lsilu_matrix lsilu_matrix;
typedef struct lsilu_precond lsilu_precond;

enum { LSILU_LEVELS_A = 0, LSILU_LEVELS_APLUSAT = 1 };
enum { LSILU_LOWER_AUTO = 0, LSILU_LOWER_NONE = 1, LSILU_LOWER_SR = 2, LSILU_LOWER_ER = 3 };
enum { LSILU_PATH_SERIAL = 0, LSILU_PATH_CSRLS = 1, LSILU_PATH_LS = 2, LSILU_PATH_LS_LOWER = 3 };
enum { LSILU_FORWARD = 0, LSILU_BACKWARD = 1 };

LSILU_API const char* lsilu_version(void);
LSILU_API const char* lsilu_status_string(lsilu_status status);
/* Message of the calling thread's most recent failure, "" if none. */
LSILU_API const char* lsilu_last_error(void);
/* Row attached to the most recent failure, -1 if none. */
LSILU_API int32_t lsilu_last_error_row(void);

/* Matrices */
LSILU_API lsilu_status lsilu_matrix_read(const char* path, lsilu_matrix** out);
LSILU_API lsilu_status lsilu_matrix_write(const lsilu_matrix* a, const char* path);
/* kind: "poisson2d", "poisson3d", "convdiff2d" or "tridiag". */
LSILU_API lsilu_status lsilu_matrix_generate(const char* kind, int32_t size, uint64_t seed, lsilu_matrix** out);
/* Copies sorted CSR arrays; row_start has n + 1 entries. */
LSILU_API lsilu_status lsilu_matrix_from_csr(int32_t n, const int32_t* row_start, const int32_t* col,
                                             const double* val, lsilu_matrix** out);
LSILU_API void lsilu_matrix_free(lsilu_matrix* a);
LSILU_API int32_t lsilu_matrix_rows(const lsilu_matrix* a);
LSILU_API int32_t lsilu_matrix_nnz(const lsilu_matrix* a);
/* Writes the half bandwidth max |i - j|. */
LSILU_API lsilu_status lsilu_matrix_bandwidth(const lsilu_matrix* a, int32_t* out);
/* Writes 1 when A equals its transpose exactly, else 0. */
LSILU_API lsilu_status lsilu_matrix_is_symmetric(const lsilu_matrix* a, int* out);
/* y = A x; x and y hold n entries and must not alias. */
LSILU_API lsilu_status lsilu_matrix_spmv(const lsilu_matrix* a, const double* x, double* y);
/* P A P^T where perm[new] = old. */
LSILU_API lsilu_status lsilu_matrix_permute(const lsilu_matrix* a, const int32_t* perm, lsilu_matrix** out);

/* Orderings, written as perm[new] = old into n entries. */
LSILU_API lsilu_status lsilu_read_permutation(const char* path, int32_t n, int32_t* perm);
LSILU_API lsilu_status lsilu_rcm_order(const lsilu_matrix* a, int32_t* perm);

typedef struct lsilu_options {
  int levels_on;         /* LSILU_LEVELS_* */
  int32_t min_level_rows;
  double density_factor;
  int suffix_only;       /* only a trailing run of failing levels leaves the upper stage */
  int fill_level;        /* k of ILU(k) */
  double drop_tol;       /* tau; 0 disables dropping */
  int milu;
  int lower;             /* LSILU_LOWER_* */
  double er_rows_per_thread;
  double max_imbalance;
  int32_t tile_size;
  int parallel_corner;
  int level_order;       /* 0 keeps the input order */
  int apply_path;        /* LSILU_PATH_* used by lsilu_precond_apply */
} lsilu_options;

LSILU_API void lsilu_options_default(lsilu_options* opt);

typedef struct lsilu_stats {
  int32_t n;
  int32_t nnz;
  int32_t factor_nnz;
  int32_t num_levels;
  int32_t min_level_rows;
  int32_t max_level_rows;
  int32_t median_level_rows;
  int32_t upper_rows;
  int32_t lower_rows;
  int lower_method;      /* resolved LSILU_LOWER_*, never AUTO */
  int fell_back_to_er;
  double lower_imbalance;
  int32_t dependencies;
  int32_t cross_worker_dependencies;
  int32_t retained_waits;
  int32_t tiles;
  int parallel_corner;
} lsilu_stats;

/* Symbolic setup on a pool of nthreads workers: levels, partition,
 * permutation, pattern, copy-fill and every schedule. */
LSILU_API lsilu_status lsilu_precond_create(const lsilu_matrix* a, const lsilu_options* opt, int nthreads,
                                            lsilu_precond** out);
LSILU_API void lsilu_precond_free(lsilu_precond* m);
/* Restores the assembled values so the factorization can be repeated. */
LSILU_API lsilu_status lsilu_precond_reset(lsilu_precond* m);
LSILU_API lsilu_status lsilu_precond_factor(lsilu_precond* m);
LSILU_API lsilu_status lsilu_precond_factor_serial(lsilu_precond* m);
/* FNV-1a hash of the factor values. */
LSILU_API lsilu_status lsilu_precond_digest(const lsilu_precond* m, uint64_t* out);
LSILU_API lsilu_status lsilu_precond_stats(const lsilu_precond* m, lsilu_stats* out);
/* Level permutation, perm[new] = old. */
LSILU_API lsilu_status lsilu_precond_permutation(const lsilu_precond* m, int32_t* perm);
/* One triangular solve in the factor ordering. */
LSILU_API lsilu_status lsilu_precond_solve(const lsilu_precond* m, int path, int which, const double* b, double* x);
/* z = M^{-1} r in the matrix's own ordering. */
LSILU_API lsilu_status lsilu_precond_apply(const lsilu_precond* m, const double* r, double* z);

typedef struct lsilu_krylov_result {
  int32_t iterations;
  int converged;
  int breakdown;
  double relative_residual;  /* true residual at exit */
  int32_t history_length;    /* entries produced, may exceed the buffer */
} lsilu_krylov_result;

/* m may be NULL for no preconditioning. x receives n entries. history, if
 * not NULL, receives up to history_capacity relative residuals. */
LSILU_API lsilu_status lsilu_pcg(const lsilu_matrix* a, const double* b, const lsilu_precond* m, double tol,
                                 int32_t maxit, double* x, double* history, int32_t history_capacity,
                                 lsilu_krylov_result* result);
LSILU_API lsilu_status lsilu_gmres(const lsilu_matrix* a, const double* b, const lsilu_precond* m, int32_t restart,
                                   double tol, int32_t maxit, double* x, double* history, int32_t history_capacity,
                                   lsilu_krylov_result* result);

#ifdef __cplusplus
}
#endif

#endif /* LSILU_LSILU_H */
