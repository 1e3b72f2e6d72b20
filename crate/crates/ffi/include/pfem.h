#ifndef PFEM_H
#define PFEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PfemStatus {
  PFEM_STATUS_OK = 0,
  PFEM_STATUS_INVALID_ARGUMENT = 1,
  PFEM_STATUS_VALIDATION = 2,
  PFEM_STATUS_SOLVER = 3,
  PFEM_STATUS_STAGNATION = 4,
  PFEM_STATUS_IO = 5,
  PFEM_STATUS_PANIC = 6,
} PfemStatus;

/**
 * A validated parallelogram mesh.
 */
typedef struct PfemMesh PfemMesh;

/**
 * Solution summary and indicators from [`pfem_solve_benchmark`].
 */
typedef struct PfemResult PfemResult;

typedef struct PfemSummary {
  size_t dofs;
  double eta;
  double osc;
  double energy_err;
  double tilde_err;
  /**
   * `eta / tilde_err`, or NaN when the error vanishes.
   */
  double effectivity;
} PfemSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t pfem_last_error(char *buf, size_t len);

/**
 * Parses and validates a mesh given as JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PfemStatus pfem_mesh_from_json(const char *json, struct PfemMesh **out);

/**
 * # Safety
 * `mesh` must be null or a handle from [`pfem_mesh_from_json`] not yet freed.
 */
void pfem_mesh_free(struct PfemMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle; the output pointers must be writable or null.
 */
enum PfemStatus pfem_mesh_counts(const struct PfemMesh *mesh,
                                 size_t *vertices,
                                 size_t *elements,
                                 size_t *edges);

/**
 * `P_n^{(alpha, beta)}(x)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PfemStatus pfem_jacobi_eval(size_t n, double alpha, double beta, double x, double *out);

/**
 * Squared norm of the symmetric Jacobi polynomial of degree `p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PfemStatus pfem_gamma_p(double beta, size_t p, double *out);

/**
 * `n`-point Gauss-Jacobi rule for the weight `(1-x)^alpha (1+x)^beta`.
 *
 * # Safety
 * `nodes` and `weights` must each point to `n` writable doubles.
 */
enum PfemStatus pfem_gauss_jacobi(size_t n,
                                  double alpha,
                                  double beta,
                                  double *nodes,
                                  double *weights);

/**
 * Solves a named benchmark at uniform degree `p` and evaluates the
 * estimator with `delta`.
 *
 * # Safety
 * `mesh` must be a live handle, `benchmark` a NUL-terminated string and
 * `out` writable.
 */
enum PfemStatus pfem_solve_benchmark(const struct PfemMesh *mesh,
                                     const char *benchmark,
                                     size_t p,
                                     double delta,
                                     struct PfemResult **out);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void pfem_result_free(struct PfemResult *result);

/**
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum PfemStatus pfem_result_summary(const struct PfemResult *result, struct PfemSummary *out);

/**
 * Copies per-element indicators into arrays of length `len`, which must
 * equal the number of elements. Null arrays are skipped.
 *
 * # Safety
 * `result` must be a live handle; each non-null array must hold `len` doubles.
 */
enum PfemStatus pfem_result_element_indicators(const struct PfemResult *result,
                                               double *eta_b,
                                               double *eta_e,
                                               double *osc,
                                               size_t len);

/**
 * Runs a config file as the command-line tool would. A stagnating adaptive
 * run returns [`PfemStatus::Stagnation`].
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum PfemStatus pfem_run_config(const char *path);

/**
 * Numeric value of a status, for bindings without enum support.
 */
int pfem_status_code(enum PfemStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PFEM_H */
