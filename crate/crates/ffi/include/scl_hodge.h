#ifndef SCL_HODGE_H
#define SCL_HODGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SclStatus {
  SCL_STATUS_OK = 0,
  SCL_STATUS_NULL_POINTER = 1,
  SCL_STATUS_VALIDATION = 2,
  SCL_STATUS_NUMERICAL = 3,
  SCL_STATUS_INVALID_UTF8 = 4,
  SCL_STATUS_BUFFER_TOO_SMALL = 5,
  SCL_STATUS_PANIC = 6,
} SclStatus;

/**
 * A complex together with its edge lengths.
 */
typedef struct SclComplex SclComplex;

/**
 * Assembled Whitney mass matrices of a complex.
 */
typedef struct SclWhitney SclWhitney;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string. `len` receives the message length without the
 * terminator.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes or null with `cap == 0`; `len` must be
 * valid or null.
 */
enum SclStatus scl_last_error(char *buf, size_t cap, size_t *len);

/**
 * Parses a complex in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum SclStatus scl_complex_parse(const char *text, struct SclComplex **out);

/**
 * Flat torus with `n` cells per side in dimension `dim`, lattice spacing `spacing`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SclStatus scl_torus_new(size_t n, size_t dim, double spacing, struct SclComplex **out);

/**
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void scl_complex_free(struct SclComplex *h);

/**
 * Dimension of the complex.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
enum SclStatus scl_complex_dim(const struct SclComplex *h, size_t *out);

/**
 * Number of simplices of degree `k`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
enum SclStatus scl_complex_count(const struct SclComplex *h, size_t k, size_t *out);

/**
 * Writes the Betti numbers into `out[0..=dim]`.
 *
 * # Safety
 * `out` must be valid for `cap` writes.
 */
enum SclStatus scl_complex_betti(const struct SclComplex *h, size_t *out, size_t cap);

/**
 * Assembles mass matrices with quadrature order `order`; `smoothed`
 * selects the mollified partition of unity.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
enum SclStatus scl_whitney_new(const struct SclComplex *h,
                               size_t order,
                               bool smoothed,
                               struct SclWhitney **out);

/**
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void scl_whitney_free(struct SclWhitney *h);

/**
 * Smallest positive coexact eigenvalue in degree `degree`.
 *
 * # Safety
 * `w` must be a live handle and `out` valid for writes.
 */
enum SclStatus scl_coexact_gap(const struct SclWhitney *w, size_t degree, double *out);

/**
 * Filling norm of the 1-cycle `z` (one coefficient per edge). `exact`
 * selects rational arithmetic.
 *
 * # Safety
 * `z` must be valid for `len` reads and `out` for writes.
 */
enum SclStatus scl_fill_norm(const struct SclComplex *h,
                             const double *z,
                             size_t len,
                             bool exact,
                             double *out);

/**
 * Last growth ratio `‖Fⁿa‖₂ / ‖Fⁿ⁻¹a‖₂` for the class `a[0..4]`.
 *
 * # Safety
 * `a` must be valid for 4 reads and `out` for writes.
 */
enum SclStatus scl_growth_ratio(const int64_t *a, uint32_t n, double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *scl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCL_HODGE_H */
