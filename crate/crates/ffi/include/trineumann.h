#ifndef TRINEUMANN_H
#define TRINEUMANN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum TnStatus {
  TN_STATUS_OK = 0,
  TN_STATUS_NULL_POINTER = 1,
  TN_STATUS_INVALID_ARGUMENT = 2,
  TN_STATUS_DOMAIN = 3,
  TN_STATUS_DEGENERATE = 4,
  TN_STATUS_NO_CONVERGENCE = 5,
  TN_STATUS_IO = 6,
  TN_STATUS_BUFFER_TOO_SMALL = 7,
  TN_STATUS_PANIC = 8,
} TnStatus;

/*
 Reflection class of an eigenfunction.
 */
typedef enum TnSymmetry {
  TN_SYMMETRY_SYMMETRIC = 0,
  TN_SYMMETRY_ANTISYMMETRIC = 1,
  TN_SYMMETRY_MIXED = 2,
  TN_SYMMETRY_NOT_APPLICABLE = 3,
} TnSymmetry;

/*
 Opaque bound audit report.
 */
typedef struct TnReport TnReport;

/*
 Opaque list of discrete eigenpairs from one mesh level.
 */
typedef struct TnSpectrum TnSpectrum;

/*
 Opaque triangle.
 */
typedef struct TnTriangle TnTriangle;

/*
 Closed-form bounds on the first nonzero eigenvalue.
 */
typedef struct TnBounds {
  double pi_squared_diameter_lower;
  double j11_diameter_lower;
  double j11_perimeter_lower;
  double pi_perimeter_lower;
  double cheng_upper;
  double sum_of_squares_upper;
} TnBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copy the calling thread's last error message, NUL-terminated, into `buf`.
 Returns the message length in bytes without the terminator; when that is
 `>= len` the copy was truncated.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t tn_last_error_message(char *buf, size_t len);

/*
 Triangle from six coordinates `x0, y0, x1, y1, x2, y2`.

 # Safety
 `xy` must point to six doubles; `out` must be writable.
 */
enum TnStatus tn_triangle_new(const double *xy, struct TnTriangle **out);

/*
 Isosceles triangle with apex angle `aperture` (radians) and equal sides `leg`.

 # Safety
 `out` must be writable.
 */
enum TnStatus tn_triangle_isosceles(double aperture, double leg, struct TnTriangle **out);

/*
 # Safety
 `t` must be null or a handle from this library, not yet freed.
 */
void tn_triangle_free(struct TnTriangle *t);

/*
 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum TnStatus tn_triangle_diameter(const struct TnTriangle *t, double *out);

/*
 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum TnStatus tn_triangle_bounds(const struct TnTriangle *t, struct TnBounds *out);

/*
 First `k` nonzero Neumann eigenpairs on the level-`level` mesh.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum TnStatus tn_solve(const struct TnTriangle *t,
                       uint32_t level,
                       uint32_t k,
                       struct TnSpectrum **out);

/*
 # Safety
 `s` must be null or a live spectrum handle.
 */
size_t tn_spectrum_len(const struct TnSpectrum *s);

/*
 # Safety
 `s` must be a live handle; `value` and `symmetry` must be writable.
 */
enum TnStatus tn_spectrum_get(const struct TnSpectrum *s,
                              size_t index,
                              double *value,
                              enum TnSymmetry *symmetry);

/*
 # Safety
 `s` must be null or a handle from this library, not yet freed.
 */
void tn_spectrum_free(struct TnSpectrum *s);

/*
 Extrapolated first nonzero eigenvalue from `n_levels` mesh levels, each
 twice the previous one.

 # Safety
 `t` must be a live handle, `levels` must point to `n_levels` integers,
 `value` and `error` must be writable.
 */
enum TnStatus tn_fundamental_tone(const struct TnTriangle *t,
                                  const uint32_t *levels_ptr,
                                  size_t n_levels,
                                  double *value,
                                  double *error);

/*
 Evaluate all bounds against an extrapolated eigenvalue.

 # Safety
 As [`tn_fundamental_tone`]; `out` must be writable.
 */
enum TnStatus tn_audit(const struct TnTriangle *t,
                       const uint32_t *levels_ptr,
                       size_t n_levels,
                       struct TnReport **out);

/*
 # Safety
 `r` must be a live handle; `out` must be writable.
 */
enum TnStatus tn_report_chain_ok(const struct TnReport *r, bool *out);

/*
 Serialize the report as JSON into `buf` (NUL-terminated). `needed`
 receives the JSON length in bytes; when `len <= *needed` nothing is
 copied and `BufferTooSmall` is returned.

 # Safety
 `r` must be a live handle, `buf` null or `len` writable bytes, `needed` writable.
 */
enum TnStatus tn_report_json(const struct TnReport *r, char *buf, size_t len, size_t *needed);

/*
 # Safety
 `r` must be null or a handle from this library, not yet freed.
 */
void tn_report_free(struct TnReport *r);

/*
 `index`-th positive zero of `J_order` (order 0 or 1, index from 1).

 # Safety
 `out` must be writable.
 */
enum TnStatus tn_bessel_j_zero(uint32_t order, uint32_t index, double *out);

/*
 First positive zero of `J'_nu`.

 # Safety
 `out` must be writable.
 */
enum TnStatus tn_bessel_jprime_zero(double nu, double *out);

/*
 Order at which the first zero of `J'_nu` equals `j_{1,1}`.
 */
double tn_jprime_crossing(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRINEUMANN_H */
