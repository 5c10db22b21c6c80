#ifndef QEVOLVE_H
#define QEVOLVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  QE_STATUS_OK = 0,
  QE_STATUS_ARGUMENT = 1,
  QE_STATUS_DEGENERATE = 2,
  QE_STATUS_SINGULAR_COST = 3,
  QE_STATUS_SINGULAR_MATRIX = 4,
  QE_STATUS_UNSTABLE = 5,
  QE_STATUS_DIVERGED = 6,
  QE_STATUS_STATE = 7,
  QE_STATUS_CONFIG = 8,
  QE_STATUS_IO = 9,
  QE_STATUS_NULL_POINTER = 10,
  QE_STATUS_PANIC = 11,
} QeStatus;

/**
 * Boundary type of a Laplacian.
 */
typedef enum {
  QE_BOUNDARY_DIRICHLET = 0,
  QE_BOUNDARY_NEUMANN = 1,
} QeBoundary;

/**
 * Which twin of an experiment to run.
 */
typedef enum {
  QE_MODE_QUANTUM = 0,
  QE_MODE_ORACLE_ONLY = 1,
  QE_MODE_VERIFY = 2,
} QeMode;

/**
 * Opaque operator handle.
 */
typedef struct QeOperator QeOperator;

/**
 * Opaque experiment report handle.
 */
typedef struct QeReport QeReport;

/**
 * Opaque warm-starting solver handle.
 */
typedef struct QeSolver QeSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after success).
 * The pointer stays valid until the next call into this library.
 */
const char *qe_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qe_version(void);

/**
 * Builds `I * identity + delta * L` for the 1D Laplacian `L` on `2^n` nodes.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QeStatus qe_operator_heat_1d(size_t n,
                             QeBoundary boundary,
                             double delta,
                             double identity,
                             QeOperator **out);

/**
 * Releases an operator; null is ignored.
 *
 * # Safety
 * `op` must come from this library and not have been freed.
 */
void qe_operator_free(QeOperator *op);

/**
 * Vector length the operator acts on (`2^n`), or 0 for null.
 *
 * # Safety
 * `op` must be null or a live operator handle.
 */
size_t qe_operator_dim(const QeOperator *op);

/**
 * Number of non-identity terms, or 0 for null.
 *
 * # Safety
 * `op` must be null or a live operator handle.
 */
size_t qe_operator_term_count(const QeOperator *op);

/**
 * `out = A x`.
 *
 * # Safety
 * `x` and `out` must each point to `len` doubles; `op` must be live.
 */
QeStatus qe_operator_apply(const QeOperator *op, const double *x, double *out, size_t len);

/**
 * `<psi|A|psi>` for a real, normalized `psi` evaluated term by term.
 *
 * # Safety
 * `psi` must point to `len` doubles, `value` to one writable double.
 */
QeStatus qe_operator_expect(const QeOperator *op, const double *psi, size_t len, double *value);

/**
 * Creates a solver with `layers` ansatz layers, convergence tolerance
 * `tol` (0 selects the default) and a seed for random initializations.
 * The solver warm-starts each solve from the previous optimum.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QeStatus qe_solver_new(size_t layers, double tol, uint64_t seed, QeSolver **out);

/**
 * Releases a solver; null is ignored.
 *
 * # Safety
 * `solver` must come from this library and not have been freed.
 */
void qe_solver_free(QeSolver *solver);

/**
 * Solves `A x = b` variationally. `iterations` (optional) receives the
 * optimizer iteration count.
 *
 * # Safety
 * `b` and `x` must each point to `len` doubles; `iterations` may be null.
 */
QeStatus qe_solver_solve(QeSolver *solver,
                         const QeOperator *op,
                         const double *b,
                         double *x,
                         size_t len,
                         size_t *iterations);

/**
 * Runs an experiment described by TOML text.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out` writable.
 */
QeStatus qe_run_config(const char *config, QeMode mode, QeReport **out);

/**
 * Releases a report; null is ignored.
 *
 * # Safety
 * `report` must come from this library and not have been freed.
 */
void qe_report_free(QeReport *report);

/**
 * One-line summary owned by the report.
 *
 * # Safety
 * `report` must be null or live; null yields null.
 */
const char *qe_report_summary(const QeReport *report);

/**
 * Time-averaged trace error; NaN when the run was not verified.
 *
 * # Safety
 * `report` must be null or live; null yields NaN.
 */
double qe_report_mean_trace_error(const QeReport *report);

/**
 * Writes the report's CSV files and summary into `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated path; `report` must be live.
 */
QeStatus qe_report_write(const QeReport *report, const char *dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QEVOLVE_H */
