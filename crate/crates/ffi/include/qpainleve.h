#ifndef QPAINLEVE_H
#define QPAINLEVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Overall outcome of a report.
 */
typedef enum QpOutcome {
  QP_OUTCOME_PASS = 0,
  QP_OUTCOME_FAIL = 1,
  QP_OUTCOME_RESOLVED_WITH_CORRECTION = 2,
} QpOutcome;

/*
 Result code of every call.
 */
typedef enum QpStatus {
  QP_STATUS_OK = 0,
  QP_STATUS_USAGE = 1,
  QP_STATUS_PARSE = 2,
  QP_STATUS_UNSUPPORTED_MODE = 3,
  QP_STATUS_DEGENERATE_POINT = 4,
  QP_STATUS_DOMAIN = 5,
  QP_STATUS_DIVISION_REMAINDER = 6,
  QP_STATUS_PRECISION = 7,
  QP_STATUS_QUADRATURE_HEALTH = 8,
  QP_STATUS_INTERNAL = 9,
  QP_STATUS_NULL_POINTER = 10,
  QP_STATUS_UTF8 = 11,
  QP_STATUS_PANIC = 12,
} QpStatus;

/*
 A finished report with its JSON rendering.
 */
typedef struct QpReport QpReport;

/*
 A verification request being assembled.
 */
typedef struct QpTask QpTask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty if none. Valid until the next failure.
 */
const char *qp_last_error(void);

/*
 Library version as a static string.
 */
const char *qp_version(void);

/*
 Creates a task of the given kind (`weyl`, `eom`, `zero-curvature`, `radial`, `gauge`,
 `table1`, `n1`, `pde-symbolic`, `pde-numeric`, `oracle-moments`).

 # Safety
 `kind` must be a valid C string and `out` a valid pointer.
 */
enum QpStatus qp_task_new(const char *kind, struct QpTask **out);

/*
 Sets a parameter (`family`, `N`, `m`, `hbar`, `b`, `t`, ...) or an option
 (`trials`, `seed`, `prec`, `gauge_a`, `mode`, `kmax`, `tol`, `timings`).

 # Safety
 `task` must come from `qp_task_new`; `key` and `value` must be valid C strings.
 */
enum QpStatus qp_task_set(struct QpTask *task, const char *key, const char *value);

/*
 Runs the task. On success `*out` receives a report to release with `qp_report_free`.

 # Safety
 `task` must come from `qp_task_new` and `out` must be a valid pointer.
 */
enum QpStatus qp_task_run(const struct QpTask *task, struct QpReport **out);

/*
 # Safety
 `task` must come from `qp_task_new` (or be null) and not be used afterwards.
 */
void qp_task_free(struct QpTask *task);

/*
 Runs acceptance criteria (`criteria[0..len]`, or all when `len` is 0).

 # Safety
 `criteria` must point to `len` integers (or be null when `len` is 0); `out` must be valid.
 */
enum QpStatus qp_suite_acceptance(const uint32_t *criteria,
                                  size_t len,
                                  uint64_t seed,
                                  uint32_t prec,
                                  struct QpReport **out);

/*
 # Safety
 `report` must come from this library.
 */
enum QpOutcome qp_report_outcome(const struct QpReport *report);

/*
 # Safety
 `report` must come from this library.
 */
size_t qp_report_check_count(const struct QpReport *report);

/*
 Number of failed checks.

 # Safety
 `report` must come from this library.
 */
size_t qp_report_failed_count(const struct QpReport *report);

/*
 JSON rendering owned by the report.

 # Safety
 `report` must come from this library; the string lives as long as the report.
 */
const char *qp_report_json(const struct QpReport *report);

/*
 # Safety
 `report` must come from this library (or be null) and not be used afterwards.
 */
void qp_report_free(struct QpReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPAINLEVE_H */
