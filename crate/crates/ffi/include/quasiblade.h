#ifndef QUASIBLADE_H
#define QUASIBLADE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_NULL_POINTER = 1,
  QB_STATUS_INVALID_ARGUMENT = 2,
  QB_STATUS_IO = 3,
  QB_STATUS_PARSE = 4,
  QB_STATUS_INCONSISTENT_DATA = 5,
  QB_STATUS_SOLVE_FAILED = 6,
  QB_STATUS_BUFFER_TOO_SMALL = 7,
  QB_STATUS_PANIC = 8,
} QbStatus;

typedef struct QbBladeSolution QbBladeSolution;

typedef struct QbDistribution QbDistribution;

typedef struct QbRun QbRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *qb_last_error_message(void);

/**
 * Builds a velocity distribution from `n` samples of arc length `s` and
 * speed `v`.
 *
 * # Safety
 * `s` and `v` must point to `n` readable doubles; `out` must be writable.
 */
enum QbStatus qb_distribution_new(const double *s,
                                  const double *v,
                                  size_t n,
                                  double total_length,
                                  size_t branch_first,
                                  size_t branch_second,
                                  double v_inf,
                                  double incidence,
                                  struct QbDistribution **out);

/**
 * Reads a velocity distribution from a JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum QbStatus qb_distribution_read_json(const char *path, struct QbDistribution **out);

/**
 * Number of samples.
 *
 * # Safety
 * `d` must be a live handle or null.
 */
size_t qb_distribution_len(const struct QbDistribution *d);

/**
 * # Safety
 * `d` must be a handle from this library or null; it is invalid afterwards.
 */
void qb_distribution_free(struct QbDistribution *d);

/**
 * Solves the inverse problem for one blade. With `w1 != 0` the modified
 * problem is solved instead. The contour starts at `(x0, y0)`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum QbStatus qb_solve_blade(const struct QbDistribution *d,
                             size_t n_boundary,
                             size_t n_contour,
                             double x0,
                             double y0,
                             double w1,
                             struct QbBladeSolution **out);

/**
 * Number of contour nodes.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
size_t qb_solution_contour_len(const struct QbBladeSolution *s);

/**
 * Copies the contour as interleaved `x, y` pairs into `xy`, which holds
 * `capacity` doubles.
 *
 * # Safety
 * `s` must be a live handle; `xy` must point to `capacity` writable doubles.
 */
enum QbStatus qb_solution_contour(const struct QbBladeSolution *s, double *xy, size_t capacity);

/**
 * Closure defect `[re, im]`, speed-at-infinity defect and circulation
 * after correction.
 *
 * # Safety
 * `s` must be a live handle; `out` must point to 4 writable doubles.
 */
enum QbStatus qb_solution_report(const struct QbBladeSolution *s, double *out);

/**
 * # Safety
 * `s` must be a handle from this library or null; it is invalid afterwards.
 */
void qb_solution_free(struct QbBladeSolution *s);

/**
 * Least-squares translation placing the second point set on the first.
 *
 * # Safety
 * All four arrays must hold `n` doubles; `dx`, `dy` must be writable.
 */
enum QbStatus qb_least_squares_shift(const double *x1,
                                     const double *y1,
                                     const double *x2,
                                     const double *y2,
                                     size_t n,
                                     double *dx,
                                     double *dy);

/**
 * Runs the design pipeline from a configuration file. Artifacts are
 * written when `out_dir` is non-null. `all_pass` receives whether every
 * verdict passed.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string, `out_dir` one or null;
 * `all_pass` and `out` must be writable.
 */
enum QbStatus qb_run_config(const char *config_path,
                            const char *out_dir,
                            bool *all_pass,
                            struct QbRun **out);

/**
 * Number of sections in the run.
 *
 * # Safety
 * `r` must be a live handle or null.
 */
size_t qb_run_section_count(const struct QbRun *r);

/**
 * JSON run report, owned by the handle.
 *
 * # Safety
 * `r` must be a live handle or null.
 */
const char *qb_run_report_json(const struct QbRun *r);

/**
 * # Safety
 * `r` must be a handle from this library or null; it is invalid afterwards.
 */
void qb_run_free(struct QbRun *r);

/**
 * Library version as a static string.
 */
const char *qb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASIBLADE_H */
