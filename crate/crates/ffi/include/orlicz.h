#ifndef ORLICZ_H
#define ORLICZ_H

#pragma once

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrliczStatus {
  ORLICZ_STATUS_OK = 0,
  ORLICZ_STATUS_NULL_POINTER = 1,
  ORLICZ_STATUS_INVALID_UTF8 = 2,
  ORLICZ_STATUS_INVALID_PARAMETER = 3,
  ORLICZ_STATUS_DIMENSION_MISMATCH = 4,
  ORLICZ_STATUS_CONFIG = 5,
  ORLICZ_STATUS_PRECONDITION = 6,
  ORLICZ_STATUS_OUT_OF_SCOPE = 7,
  ORLICZ_STATUS_NUMERICAL = 8,
  ORLICZ_STATUS_BUFFER_TOO_SMALL = 9,
  ORLICZ_STATUS_PANIC = 10,
} OrliczStatus;

/**
 * An x-independent Φ-function.
 */
typedef struct OrliczPhi OrliczPhi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a Φ-function definition (`family = "power-norm"`, ...) from TOML.
 *
 * # Safety
 * `toml` must be a nul-terminated string and `out` a writable pointer.
 */
enum OrliczStatus orlicz_phi_from_toml(const char *toml, struct OrliczPhi **out);

/**
 * `|ξ|^p` in dimension `dim`.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum OrliczStatus orlicz_phi_new_power_norm(size_t dim, double p, struct OrliczPhi **out);

/**
 * # Safety
 * `phi` must come from this library; `xi` must hold `len` doubles.
 */
enum OrliczStatus orlicz_phi_eval(const struct OrliczPhi *phi,
                                  const double *xi,
                                  size_t len,
                                  double *out);

/**
 * Returns the dimension of `phi`, or 0 for a null handle.
 *
 * # Safety
 * `phi` must be null or come from this library.
 */
size_t orlicz_phi_dim(const struct OrliczPhi *phi);

/**
 * # Safety
 * `phi` must be null or come from this library and not be used afterwards.
 */
void orlicz_phi_free(struct OrliczPhi *phi);

/**
 * Greatest convex minorant of `phi` on the grid `[lo, hi]` with `per_axis`
 * nodes per axis, built on the support window dilated by `support_scale`.
 * Writes `per_axis^dim` envelope values in row-major order (last axis
 * fastest) and the refinement slack estimate.
 *
 * # Safety
 * `lo`/`hi` must hold `dim(phi)` doubles, `values` must hold `capacity`
 * doubles, and `slack` must be null or writable.
 */
enum OrliczStatus orlicz_envelope_grid(const struct OrliczPhi *phi,
                                       const double *lo,
                                       const double *hi,
                                       size_t per_axis,
                                       size_t support_scale,
                                       double *values,
                                       size_t capacity,
                                       double *slack);

/**
 * Runs `orlicz check <condition>` on an analysis config given as TOML.
 * `exit_code` receives 0 (pass) or 1 (fail or vacuous); `report` receives
 * the full report, to be released with [`orlicz_string_free`].
 *
 * # Safety
 * String arguments must be nul-terminated; out pointers must be writable.
 */
enum OrliczStatus orlicz_run_check(const char *config_toml,
                                   const char *condition,
                                   int32_t *exit_code,
                                   char **report);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void orlicz_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into the library on the same thread.
 */
const char *orlicz_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORLICZ_H */
