#ifndef WPSK_H
#define WPSK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  WPSK_STATUS_OK = 0,
  WPSK_STATUS_CONFIG = 1,
  WPSK_STATUS_DOMAIN = 2,
  WPSK_STATUS_NOT_APPLICABLE = 3,
  WPSK_STATUS_TRUNCATION = 4,
  WPSK_STATUS_PRECISION_INSUFFICIENT = 5,
  WPSK_STATUS_NUMERICAL = 6,
  WPSK_STATUS_IO = 7,
  WPSK_STATUS_NULL_POINTER = 8,
  WPSK_STATUS_PANIC = 9,
} WpskStatus;

typedef enum {
  WPSK_FAMILY_GAUSSIAN = 0,
  WPSK_FAMILY_EXPONENTIAL = 1,
  WPSK_FAMILY_HERMITE = 2,
  WPSK_FAMILY_BESSEL = 3,
  WPSK_FAMILY_POWER = 4,
} WpskFamily;

typedef enum {
  WPSK_APPROXIMATION_KIND_POLYNOMIAL = 0,
  WPSK_APPROXIMATION_KIND_WEIGHTED_POLYNOMIAL = 1,
  WPSK_APPROXIMATION_KIND_KERNEL_INTERPOLANT = 2,
} WpskApproximationKind;

typedef enum {
  WPSK_NORM_SUP = 0,
  WPSK_NORM_L2 = 1,
} WpskNorm;

/**
 * Opaque handle to a linear approximation together with its kernel.
 */
typedef struct WpskApproximation WpskApproximation;

/**
 * Opaque kernel handle.
 */
typedef struct WpskKernel WpskKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *wpsk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wpsk_version(void);

/**
 * Creates a kernel. Parameters not used by the family are ignored.
 *
 * # Safety
 * `out_kernel` must be writable.
 */
WpskStatus wpsk_kernel_new(WpskFamily family,
                           double epsilon,
                           double tau,
                           double beta,
                           WpskKernel **out_kernel);

/**
 * # Safety
 * `kernel` must come from [`wpsk_kernel_new`] and not be freed already. NULL is ignored.
 */
void wpsk_kernel_free(WpskKernel *kernel);

/**
 * `K(x, y)` for `x, y` in [-1, 1].
 *
 * # Safety
 * `kernel` must be a live handle and `out_value` writable.
 */
WpskStatus wpsk_kernel_eval(const WpskKernel *kernel,
                            double x,
                            double y,
                            uint32_t digits,
                            double *out_value);

/**
 * Builds an approximation at `len` nodes in [-1, 1].
 *
 * # Safety
 * `kernel` must be a live handle, `nodes` must point to `len` doubles, `out_approx` writable.
 */
WpskStatus wpsk_approximation_new(const WpskKernel *kernel,
                                  WpskApproximationKind kind,
                                  const double *nodes,
                                  size_t len,
                                  uint32_t digits,
                                  WpskApproximation **out_approx);

/**
 * Weighted Taylor approximation of order `n` about `a`, `|a| < 1`.
 *
 * # Safety
 * `kernel` must be a live handle and `out_approx` writable.
 */
WpskStatus wpsk_approximation_weighted_taylor(const WpskKernel *kernel,
                                              double a,
                                              size_t n,
                                              uint32_t digits,
                                              WpskApproximation **out_approx);

/**
 * # Safety
 * `approx` must come from one of the constructors and not be freed already. NULL is ignored.
 */
void wpsk_approximation_free(WpskApproximation *approx);

/**
 * `log10 e_p(A)` with its certified relative error.
 *
 * # Safety
 * `approx` must be a live handle; the out pointers must be writable.
 */
WpskStatus wpsk_worst_case(const WpskApproximation *approx,
                           WpskNorm norm_kind,
                           double *out_log10,
                           double *out_rel_error);

/**
 * `log10` of the lower bound from the weighted node polynomial.
 *
 * # Safety
 * `kernel` must be a live handle, `nodes` must point to `len` doubles, `out_log10` writable.
 */
WpskStatus wpsk_lower_bound_witness(const WpskKernel *kernel,
                                    const double *nodes,
                                    size_t len,
                                    WpskNorm norm_kind,
                                    uint32_t digits,
                                    double *out_log10);

/**
 * `log10` lower and upper bounds on the `n`th minimal error; `out_applicable` tells whether `n ≥ m_L`.
 *
 * # Safety
 * `kernel` must be a live handle; the out pointers must be writable.
 */
WpskStatus wpsk_min_error_bounds(const WpskKernel *kernel,
                                 WpskNorm norm_kind,
                                 size_t n,
                                 uint32_t digits,
                                 double *out_lower,
                                 double *out_upper,
                                 bool *out_applicable);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPSK_H */
