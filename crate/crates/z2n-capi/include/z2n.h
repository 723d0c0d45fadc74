#ifndef Z2N_H
#define Z2N_H

/* Generated by cbindgen from the z2n-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of the most recent fallible call on this thread.
 */
typedef enum Z2nStatus {
  Z2nStatus_Ok = 0,
  /**
   * A required pointer argument was null or not valid UTF-8.
   */
  Z2nStatus_InvalidArgument = 1,
  /**
   * Text failed to parse.
   */
  Z2nStatus_ParseError = 2,
  /**
   * The operation is undefined for these operands (wrong signature,
   * non-invertible element, out-of-range order, ...).
   */
  Z2nStatus_DomainError = 3,
  /**
   * A file could not be read.
   */
  Z2nStatus_IoError = 4,
} Z2nStatus;

/**
 * Opaque handle: a centered superdomain morphism.
 */
typedef struct Z2nMorphism Z2nMorphism;

/**
 * Opaque handle: a series in the quotient algebra.
 */
typedef struct Z2nSeries Z2nSeries;

/**
 * Opaque handle: a formal signature (grading length, base and formal
 * variables, truncation order).
 */
typedef struct Z2nSignature Z2nSignature;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Status of the most recent fallible call on the calling thread.
 */
enum Z2nStatus z2n_last_status(void);

/**
 * Message of the most recent error on the calling thread. The pointer is
 * valid until the next fallible call on the same thread; do not free it.
 */
const char *z2n_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 */
void z2n_string_free(char *s);

/**
 * Parses a signature header block (`n = ..`, `p = ..`, `q = ..`,
 * `T = ..`, `sigma.k = bits..`). Returns null on error.
 */
struct Z2nSignature *z2n_signature_parse(const char *header);

void z2n_signature_free(struct Z2nSignature *sig);

/**
 * Truncation order of a signature.
 */
size_t z2n_signature_order(const struct Z2nSignature *sig);

/**
 * Parses a series expression over the signature. Returns null on error.
 */
struct Z2nSeries *z2n_series_parse(const struct Z2nSignature *sig, const char *text);

void z2n_series_free(struct Z2nSeries *series);

/**
 * Canonical text of a series; free with `z2n_string_free`.
 */
char *z2n_series_to_string(const struct Z2nSeries *series);

/**
 * Sum of two series over one signature.
 */
struct Z2nSeries *z2n_series_add(const struct Z2nSeries *a, const struct Z2nSeries *b);

/**
 * Difference of two series over one signature.
 */
struct Z2nSeries *z2n_series_sub(const struct Z2nSeries *a, const struct Z2nSeries *b);

/**
 * Graded product of two series over one signature.
 */
struct Z2nSeries *z2n_series_mul(const struct Z2nSeries *a, const struct Z2nSeries *b);

/**
 * Negation.
 */
struct Z2nSeries *z2n_series_neg(const struct Z2nSeries *a);

/**
 * Multiplicative inverse in the quotient; fails when the independent term
 * vanishes at the center.
 */
struct Z2nSeries *z2n_series_invert(const struct Z2nSeries *a);

/**
 * Passes to the quotient at a smaller truncation order.
 */
struct Z2nSeries *z2n_series_truncate(const struct Z2nSeries *a, size_t order);

/**
 * Polynomial part of the Taylor split at adic order `k`.
 */
struct Z2nSeries *z2n_series_approx(const struct Z2nSeries *a, size_t k);

/**
 * Order of the filtration by the formal-variable ideal; -1 for the zero
 * series (infinity).
 */
int64_t z2n_series_j_adic_order(const struct Z2nSeries *a);

/**
 * Order of the filtration by the maximal homogeneous ideal at the center;
 * -1 for the zero series (infinity).
 */
int64_t z2n_series_m_adic_order(const struct Z2nSeries *a);

/**
 * The common degree of a homogeneous series, as text like `(0,1)`.
 * Returns null (with a domain error) when the series is not homogeneous.
 */
char *z2n_series_degree(const struct Z2nSeries *a);

/**
 * Parses a morphism file (source/target headers plus coordinate
 * pullbacks). Returns null on error.
 */
struct Z2nMorphism *z2n_morphism_parse(const char *text);

void z2n_morphism_free(struct Z2nMorphism *m);

/**
 * Pulls a series over the morphism target back to its source.
 */
struct Z2nSeries *z2n_morphism_pullback(const struct Z2nMorphism *m, const struct Z2nSeries *g);

/**
 * Composite of `first: M -> N` with `second: N -> P`.
 */
struct Z2nMorphism *z2n_morphism_compose(const struct Z2nMorphism *first,
                                         const struct Z2nMorphism *second);

/**
 * Order-by-order inverse; fails when the linear part is singular.
 */
struct Z2nMorphism *z2n_morphism_invert(const struct Z2nMorphism *m);

/**
 * Realizes a sign-table file (text contents) as a degree assignment over
 * Z2^(2m); returns the listing (`n = ..` plus `sigma.k = ..` lines).
 */
char *z2n_realize_signs(const char *table);

/**
 * Runs every atlas check for an atlas file on disk and returns the
 * line-oriented PASS/FAIL report. `all_passed`, when non-null, receives
 * 1 if every check passed and 0 otherwise.
 */
char *z2n_check_atlas_file(const char *path, int32_t *all_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* Z2N_H */
