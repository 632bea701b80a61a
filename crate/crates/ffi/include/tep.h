#ifndef TEP_H
#define TEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TepDecoder {
  TEP_DECODER_BP = 0,
  TEP_DECODER_TEP = 1,
  TEP_DECODER_ML = 2,
} TepDecoder;

typedef enum TepStatus {
  TEP_STATUS_OK = 0,
  TEP_STATUS_NULL_POINTER = 1,
  TEP_STATUS_INVALID_ARGUMENT = 2,
  TEP_STATUS_PARSE = 3,
  TEP_STATUS_INFEASIBLE = 4,
  TEP_STATUS_CONTRADICTION = 5,
  TEP_STATUS_NUMERICAL = 6,
  TEP_STATUS_PANIC = 7,
} TepStatus;

/**
 * A parity-check code.
 */
typedef struct TepCode TepCode;

/**
 * Degree-distribution pair (λ, ρ).
 */
typedef struct TepDegreeDistribution TepDegreeDistribution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *tep_last_error(void);

/**
 * Parses a degree-distribution file body.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum TepStatus tep_dd_parse(const char *text, struct TepDegreeDistribution **out);

/**
 * Builds a distribution from edge-perspective polynomials such as `"x^2"`.
 *
 * # Safety
 * `lambda` and `rho` must be NUL-terminated strings; `out` must be writable.
 */
enum TepStatus tep_dd_from_polynomials(const char *lambda,
                                       const char *rho,
                                       struct TepDegreeDistribution **out);

/**
 * # Safety
 * `dd` must come from this library and not be used afterwards. NULL is a no-op.
 */
void tep_dd_free(struct TepDegreeDistribution *dd);

/**
 * Design rate `1 − ∫ρ / ∫λ`.
 *
 * # Safety
 * `dd` must be a live handle; `out` must be writable.
 */
enum TepStatus tep_dd_rate(const struct TepDegreeDistribution *dd, double *out);

/**
 * Asymptotic BP threshold.
 *
 * # Safety
 * `dd` must be a live handle; `out` must be writable.
 */
enum TepStatus tep_bp_threshold(const struct TepDegreeDistribution *dd, double *out);

/**
 * Stage A lower bound on the TEP threshold. Non-positive `e_ref` / `dt_rel`
 * select the defaults.
 *
 * # Safety
 * `dd` must be a live handle; `out` must be writable.
 */
enum TepStatus tep_tep_threshold(const struct TepDegreeDistribution *dd,
                                 double e_ref,
                                 double dt_rel,
                                 double *out);

/**
 * Samples a length-`n` code from the ensemble.
 *
 * # Safety
 * `dd` must be a live handle; `out` must be writable.
 */
enum TepStatus tep_code_sample(const struct TepDegreeDistribution *dd,
                               size_t n,
                               uint64_t seed,
                               struct TepCode **out);

/**
 * Parses a code in the `n <n> m <m> E <E>` text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum TepStatus tep_code_parse(const char *text, struct TepCode **out);

/**
 * # Safety
 * `code` must come from this library and not be used afterwards. NULL is a no-op.
 */
void tep_code_free(struct TepCode *code);

/**
 * Variable count, check count and edge count; any output may be NULL.
 *
 * # Safety
 * `code` must be a live handle; non-NULL outputs must be writable.
 */
enum TepStatus tep_code_dims(const struct TepCode *code,
                             size_t *vars,
                             size_t *checks,
                             size_t *edges);

/**
 * Decodes one received word. `received[i]` is 0, 1, or −1 for an erasure;
 * `word` receives the decoded bits with −1 where undetermined. `success` is
 * set to 1 when every bit was recovered.
 *
 * # Safety
 * `received` and `word` must point to `len` elements; `success` must be writable.
 */
enum TepStatus tep_decode(const struct TepCode *code,
                          enum TepDecoder decoder,
                          const int8_t *received,
                          size_t len,
                          int8_t *word,
                          int32_t *success);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEP_H */
