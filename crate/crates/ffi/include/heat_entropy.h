#ifndef HEAT_ENTROPY_H
#define HEAT_ENTROPY_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HeStatus {
  HE_STATUS_OK = 0,
  HE_STATUS_INVALID_ARGUMENT = 1,
  HE_STATUS_NULL_POINTER = 2,
  HE_STATUS_NOT_CONVERGED = 3,
  HE_STATUS_NON_FINITE = 4,
  HE_STATUS_POSITIVITY_LOSS = 5,
  HE_STATUS_TRUNCATION_INSUFFICIENT = 6,
  HE_STATUS_UNSUPPORTED = 7,
  HE_STATUS_CHECK_FAILED = 8,
  HE_STATUS_PANIC = 9,
} HeStatus;

/**
 * Hyperbolic heat kernel parameters.
 */
typedef struct HeH3 HeH3;

/**
 * Entropy trace of a built-in fixture together with its bound reports.
 */
typedef struct HeTrace HeTrace;

/**
 * One row of the hyperbolic entropy table; envelope ends and `eta` values
 * are converted to plain doubles and may overflow to infinity.
 */
typedef struct HeH3Record {
  double t;
  double entropy;
  double i1;
  double i2;
  double rate_direct;
  double rate_fd;
  double eta;
  double eta_lower;
  double eta_upper;
  double etap;
  double etap_lower;
  double etap_upper;
  double band_lo;
  double band_hi;
  /**
   * 1 when both quantities lie strictly inside their envelopes.
   */
  int32_t envelopes_hold;
} HeH3Record;

typedef struct HeTracePoint {
  double t;
  double entropy;
  double rate_direct;
  double rate_fd;
  double fisher;
} HeTracePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library.
 */
const char *he_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *he_version(void);

/**
 * Creates parameters for curvature `-kappa^2`. Non-positive `rtol` or
 * `atol` select the defaults (1e-10, 1e-14).
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum HeStatus he_h3_new(double kappa, double rtol, double atol, struct HeH3 **out);

/**
 * # Safety
 * `handle` must come from [`he_h3_new`] and not be used afterwards. Null is ignored.
 */
void he_h3_free(struct HeH3 *handle);

/**
 * Entropy `-int h log h` at time `t`.
 *
 * # Safety
 * `handle` must be live; `out` valid for a write.
 */
enum HeStatus he_h3_entropy(const struct HeH3 *handle, double t, double *out);

/**
 * Entropy rate at time `t`.
 *
 * # Safety
 * `handle` must be live; `out` valid for a write.
 */
enum HeStatus he_h3_entropy_rate(const struct HeH3 *handle, double t, double *out);

/**
 * Total mass of the kernel at time `t` (one up to quadrature error).
 *
 * # Safety
 * `handle` must be live; `out` valid for a write.
 */
enum HeStatus he_h3_total_mass(const struct HeH3 *handle, double t, double *out);

/**
 * Full table row at time `t`.
 *
 * # Safety
 * `handle` must be live; `out` valid for a write.
 */
enum HeStatus he_h3_record(const struct HeH3 *handle, double t, struct HeH3Record *out);

/**
 * Traces the built-in fixture `manifold` ("circle", "torus", "sphere",
 * "torus-drift"). When `times` is non-null the `len` times replace the
 * default grid (not for "torus-drift", which is time-stepped).
 *
 * # Safety
 * `manifold` must be a NUL-terminated string; `times` null or valid for
 * `len` reads; `out` valid for a write.
 */
enum HeStatus he_trace_new(const char *manifold,
                           const double *times,
                           size_t len,
                           struct HeTrace **out);

/**
 * # Safety
 * `handle` must come from [`he_trace_new`] and not be used afterwards. Null is ignored.
 */
void he_trace_free(struct HeTrace *handle);

/**
 * Number of points in the trace; 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or live.
 */
size_t he_trace_len(const struct HeTrace *handle);

/**
 * # Safety
 * `handle` must be live; `out` valid for a write.
 */
enum HeStatus he_trace_point(const struct HeTrace *handle, size_t index, struct HeTracePoint *out);

/**
 * Writes 1 to `out` when every applicable bound holds at every trace point.
 * Returns [`HeStatus::CheckFailed`] (with `out` set to 0) otherwise.
 *
 * # Safety
 * `handle` must be live; `out` valid for a write.
 */
enum HeStatus he_trace_bounds_hold(const struct HeTrace *handle, int32_t *out);

/**
 * The curvature-dimension bound on the entropy rate.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum HeStatus he_ricci_bound(size_t n, double k, double q0, double t, double *out);

/**
 * Runs the verification checks (one group when `only` is non-null) and
 * returns the JSON report in `*json_out`, to be released with
 * [`he_string_free`]. Returns [`HeStatus::CheckFailed`] when a check fails;
 * the report is produced either way.
 *
 * # Safety
 * `only` null or NUL-terminated; `json_out` valid for a write.
 */
enum HeStatus he_verify(const char *only, char **json_out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void he_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEAT_ENTROPY_H */
