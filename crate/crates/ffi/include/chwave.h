#ifndef CHWAVE_H
#define CHWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Linearized operators available through [`chw_operator_spectrum`].
 */
typedef enum ChwOperator {
  CHW_OPERATOR_L = 0,
  CHW_OPERATOR_K = 1,
  CHW_OPERATOR_JL = 2,
  CHW_OPERATOR_J_PHI_K = 3,
  CHW_OPERATOR_SCHRODINGER = 4,
} ChwOperator;

/**
 * Sampled columns of a profile.
 */
typedef enum ChwProfileField {
  CHW_PROFILE_FIELD_X = 0,
  CHW_PROFILE_FIELD_PHI = 1,
  CHW_PROFILE_FIELD_D_PHI = 2,
  CHW_PROFILE_FIELD_DD_PHI = 3,
} ChwProfileField;

/**
 * Position of `(a, b, c)` relative to the existence region.
 */
typedef enum ChwRegion {
  CHW_REGION_INTERIOR = 0,
  CHW_REGION_BOUNDARY_CONSTANT = 1,
  CHW_REGION_BOUNDARY_SOLITARY = 2,
  CHW_REGION_BOUNDARY_PEAKED = 3,
  CHW_REGION_OUTSIDE = 4,
} ChwRegion;

/**
 * Outcome of a call.
 */
typedef enum ChwStatus {
  CHW_STATUS_OK = 0,
  CHW_STATUS_NULL_POINTER = 1,
  /**
   * Arguments outside the domain of the call.
   */
  CHW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Parameters outside the existence region of smooth waves.
   */
  CHW_STATUS_NOT_IN_REGION = 3,
  /**
   * The collocation grid does not resolve the profile.
   */
  CHW_STATUS_UNRESOLVED = 4,
  /**
   * Quadrature, root finding, integration or the eigensolver failed.
   */
  CHW_STATUS_NUMERICAL_FAILURE = 5,
  CHW_STATUS_BUFFER_TOO_SMALL = 6,
  CHW_STATUS_INDEX_OUT_OF_RANGE = 7,
  CHW_STATUS_PANIC = 8,
} ChwStatus;

/**
 * Opaque sampled profile.
 */
typedef struct ChwProfile ChwProfile;

/**
 * Opaque `E/M^2` scan along a fixed-period family.
 */
typedef struct ChwStabilityCurve ChwStabilityCurve;

/**
 * Eigenvalue counts of one discretized operator.
 */
typedef struct ChwEigenSummary {
  /**
   * Zero for the flow operators, whose spectra are not real.
   */
  size_t negative;
  size_t zero;
  /**
   * Zero for the flow operators.
   */
  size_t positive;
  double spectral_radius;
  /**
   * NaN for self-adjoint operators.
   */
  double max_real_part;
  double kernel_residual;
} ChwEigenSummary;

/**
 * Imaginary-axis verdict for `J L` and `J_phi K`.
 */
typedef struct ChwSpectralStability {
  double relative_real_part;
  bool stable;
  size_t compared;
  double max_relative_gap;
  bool spectra_agree;
} ChwSpectralStability;

/**
 * One point of a fixed-period family.
 */
typedef struct ChwStabilitySample {
  double a;
  double b;
  double mass;
  double energy;
  double ratio;
  double dratio_da;
  double dratio_err;
  double det_p;
  double det_p_closed_form;
} ChwStabilitySample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next call
 * on the same thread; empty when no call has failed.
 */
const char *chw_last_error_message(void);

/**
 * Upper end `4c^3/27` of the range of `a`.
 */
enum ChwStatus chw_critical_value_a(double c, double *a_max);

/**
 * Lower and upper bounds on `b` at fixed `a` and `c`.
 */
enum ChwStatus chw_b_bounds(double a, double c, double *b_minus, double *b_plus);

enum ChwStatus chw_classify(double a, double b, double c, double tol, enum ChwRegion *region);

enum ChwStatus chw_period(double a, double b, double c, double *length);

/**
 * Partial derivatives of the period in `a` and `b`.
 */
enum ChwStatus chw_period_gradient(double a, double b, double c, double *d_a, double *d_b);

/**
 * Samples one period on `n` uniform points.
 */
enum ChwStatus chw_profile_new(double a, double b, double c, size_t n, struct ChwProfile **profile);

void chw_profile_free(struct ChwProfile *profile);

enum ChwStatus chw_profile_len(const struct ChwProfile *profile, size_t *len);

enum ChwStatus chw_profile_period(const struct ChwProfile *profile, double *length);

/**
 * Copies one sampled column into `buf`, which must hold at least
 * `chw_profile_len` values.
 */
enum ChwStatus chw_profile_copy(const struct ChwProfile *profile,
                                enum ChwProfileField field,
                                double *buf,
                                size_t buf_len);

/**
 * Eigenvalues of an operator discretized on `n` collocation points.
 *
 * `re` and `im` may both be null; otherwise each must hold `n` values and
 * receives the eigenvalues in the library's sort order.
 */
enum ChwStatus chw_operator_spectrum(const struct ChwProfile *profile,
                                     enum ChwOperator op,
                                     size_t n,
                                     double zero_tol,
                                     struct ChwEigenSummary *summary,
                                     double *re,
                                     double *im,
                                     size_t buf_len);

enum ChwStatus chw_spectral_stability(const struct ChwProfile *profile,
                                      size_t n,
                                      struct ChwSpectralStability *result);

/**
 * Scans `E/M^2` over `n` samples of the family of period `length`.
 */
enum ChwStatus chw_stability_scan(double length,
                                  double c,
                                  size_t n,
                                  struct ChwStabilityCurve **curve);

void chw_stability_curve_free(struct ChwStabilityCurve *curve);

enum ChwStatus chw_stability_curve_len(const struct ChwStabilityCurve *curve, size_t *len);

enum ChwStatus chw_stability_curve_sample(const struct ChwStabilityCurve *curve,
                                          size_t index,
                                          struct ChwStabilitySample *sample);

/**
 * True when `E/M^2` decreases along the whole curve beyond its error
 * estimate.
 */
enum ChwStatus chw_stability_curve_is_stable(const struct ChwStabilityCurve *curve, bool *stable);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHWAVE_H */
