#ifndef CRYSTRED_H
#define CRYSTRED_H

/* Generated by cbindgen from crates/crystred-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum CrystredStatus {
  CRYSTRED_STATUS_OK = 0,
  CRYSTRED_STATUS_NULL_POINTER = 1,
  CRYSTRED_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed input: bad prime, unparsable scalar, unknown identifier.
   */
  CRYSTRED_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The instance does not meet a precondition or hypothesis.
   */
  CRYSTRED_STATUS_PRECONDITION = 4,
  /**
   * The precision is too low to decide a comparison.
   */
  CRYSTRED_STATUS_PRECISION = 5,
  /**
   * Other engine error.
   */
  CRYSTRED_STATUS_ENGINE = 6,
  /**
   * A panic was caught at the boundary.
   */
  CRYSTRED_STATUS_PANIC = 7,
} CrystredStatus;

typedef enum CrystredVerdict {
  CRYSTRED_VERDICT_PASS = 0,
  CRYSTRED_VERDICT_FAIL = 1,
  CRYSTRED_VERDICT_NOT_ASSERTED = 2,
} CrystredVerdict;

/**
 * A weight with its slope-3/2 eigenvalue and derived invariants.
 */
typedef struct CrystredInstance CrystredInstance;

/**
 * A finished check: verdict plus the JSON rendering.
 */
typedef struct CrystredReport CrystredReport;

/**
 * A p-adic scalar in Q_p(sqrt p).
 */
typedef struct CrystredScalar CrystredScalar;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *crystred_last_error(void);

/**
 * Parse a scalar such as `pi^3*(1 + 2*pi)` for the prime `p`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a writable pointer.
 */
enum CrystredStatus crystred_scalar_parse(uint64_t p,
                                          const char *text,
                                          struct CrystredScalar **out);

/**
 * Valuation in units of 1/2: writes 2 v(x). Fails on zero.
 *
 * # Safety
 * `x` must be a live scalar handle and `half_units` writable.
 */
enum CrystredStatus crystred_scalar_valuation(const struct CrystredScalar *x, int64_t *half_units);

/**
 * Render a scalar in the parser's syntax. Free the result with
 * [`crystred_string_free`].
 *
 * # Safety
 * `x` must be a live scalar handle and `out` writable.
 */
enum CrystredStatus crystred_scalar_to_string(const struct CrystredScalar *x, char **out);

/**
 * # Safety
 * `x` must be null or a scalar handle not yet freed.
 */
void crystred_scalar_free(struct CrystredScalar *x);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void crystred_string_free(char *s);

/**
 * Build an instance at relative precision `prec` pi-digits.
 *
 * # Safety
 * `a_p` must be a live scalar handle and `out` writable.
 */
enum CrystredStatus crystred_instance_new(uint64_t p,
                                          uint64_t r,
                                          const struct CrystredScalar *a_p,
                                          uint32_t prec,
                                          struct CrystredInstance **out);

/**
 * Writes t and, for an exactly known tau, 2 tau. `tau_exact` is set to 0
 * when tau is only bounded below at this precision.
 *
 * # Safety
 * `inst` must be a live instance handle and all outputs writable.
 */
enum CrystredStatus crystred_instance_invariants(const struct CrystredInstance *inst,
                                                 uint32_t *t,
                                                 int64_t *tau_half_units,
                                                 bool *tau_exact);

/**
 * # Safety
 * `inst` must be null or an instance handle not yet freed.
 */
void crystred_instance_free(struct CrystredInstance *inst);

/**
 * Check the telescoping identity for a block such as `chi` or `psi(2)`.
 *
 * # Safety
 * `inst` must be a live instance handle, `id` a valid string, `out` writable.
 */
enum CrystredStatus crystred_verify_lemma(const struct CrystredInstance *inst,
                                          const char *id,
                                          struct CrystredReport **out);

/**
 * Check the image of an F_i, `id` one of F1, F2_le_t, F2_gt, F3_le_t,
 * F3_lt_t1, F3_ge_t1.
 *
 * # Safety
 * `inst` must be a live instance handle, `id` a valid string, `out` writable.
 */
enum CrystredStatus crystred_verify_prop(const struct CrystredInstance *inst,
                                         const char *id,
                                         struct CrystredReport **out);

/**
 * Classify the reduction for slope "1/2", "1" or "3/2". The report's
 * verdict is the local Langlands consistency check where one applies.
 *
 * # Safety
 * `a_p` must be a live scalar handle, `slope` a valid string, `out` writable.
 */
enum CrystredStatus crystred_classify(uint64_t p,
                                      uint64_t r,
                                      const struct CrystredScalar *a_p,
                                      const char *slope,
                                      struct CrystredReport **out);

/**
 * # Safety
 * `report` must be a live report handle.
 */
enum CrystredVerdict crystred_report_verdict(const struct CrystredReport *report);

/**
 * JSON text of the report, owned by the handle.
 *
 * # Safety
 * `report` must be a live report handle; the pointer dies with it.
 */
const char *crystred_report_json(const struct CrystredReport *report);

/**
 * # Safety
 * `report` must be null or a report handle not yet freed.
 */
void crystred_report_free(struct CrystredReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRYSTRED_H */
