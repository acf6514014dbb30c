#ifndef QSIG_H
#define QSIG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QsigStatus {
  QSIG_STATUS_OK = 0,
  QSIG_STATUS_NULL_POINTER = 1,
  QSIG_STATUS_INVALID_UTF8 = 2,
  /**
   * Parameters or configuration rejected.
   */
  QSIG_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The requested bound carries no information for these parameters.
   */
  QSIG_STATUS_VACUOUS_BOUND = 4,
  QSIG_STATUS_INDEX_OUT_OF_RANGE = 5,
  /**
   * A protocol or I/O step failed.
   */
  QSIG_STATUS_RUNTIME = 6,
  QSIG_STATUS_PANIC = 7,
} QsigStatus;

typedef enum QsigVerdict {
  QSIG_VERDICT_INVALID = 0,
  QSIG_VERDICT_VALID = 1,
  QSIG_VERDICT_TIE = 2,
} QsigVerdict;

/**
 * Users of one polynomial-signature instance.
 */
typedef struct QsigHanaoka QsigHanaoka;

/**
 * Reports of one experiment run.
 */
typedef struct QsigReport QsigReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *qsig_last_error(void);

/**
 * Library version; static storage.
 */
const char *qsig_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void qsig_string_free(char *s);

/**
 * Sets up `n` users (identities 1..=n) over `F_q`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum QsigStatus qsig_hanaoka_new(size_t n,
                                 size_t omega,
                                 uint32_t psi,
                                 uint64_t q,
                                 uint64_t seed,
                                 struct QsigHanaoka **out);

/**
 * # Safety
 * `h` must be null or a handle from `qsig_hanaoka_new`, freed once.
 */
void qsig_hanaoka_free(struct QsigHanaoka *h);

/**
 * User `signer` signs `message`; user `verifier` checks it. Users are
 * indexed from 0.
 *
 * # Safety
 * `h` must be a live handle and `accepted` valid for a write.
 */
enum QsigStatus qsig_hanaoka_sign_verify(const struct QsigHanaoka *h,
                                         size_t signer,
                                         size_t verifier,
                                         uint64_t message,
                                         bool *accepted);

/**
 * Runs an experiment config given as JSON (the format accepted by the
 * `attack` and `sweep` subcommands).
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` valid for a write.
 */
enum QsigStatus qsig_run_experiment_json(const char *config_json, struct QsigReport **out);

/**
 * # Safety
 * `r` must be null or a handle from `qsig_run_experiment_json`, freed once.
 */
void qsig_report_free(struct QsigReport *r);

/**
 * Number of trial reports; 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t qsig_report_count(const struct QsigReport *r);

/**
 * Empirical success frequency and, when one applies, the analytic bound of
 * report `index`. `bound` is set to NaN when `has_bound` is false.
 *
 * # Safety
 * `r` must be a live handle; the out pointers must be valid for writes.
 */
enum QsigStatus qsig_report_stats(const struct QsigReport *r,
                                  size_t index,
                                  double *empirical,
                                  double *bound,
                                  bool *has_bound);

/**
 * Whether any report exceeds its bound by more than 3σ.
 *
 * # Safety
 * `r` must be a live handle and `violated` valid for a write.
 */
enum QsigStatus qsig_report_violates_bound(const struct QsigReport *r, bool *violated);

/**
 * The run as JSON lines (header, then one line per report).
 *
 * # Safety
 * `r` must be a live handle and `out` valid for a write. Free the result
 * with `qsig_string_free`.
 */
enum QsigStatus qsig_report_to_jsonl(const struct QsigReport *r, char **out);

/**
 * # Safety
 * `out` must be valid for a write.
 */
enum QsigStatus qsig_p2_repudiation_bound(double s_v, size_t l, double *out);

/**
 * # Safety
 * `out` must be valid for a write.
 */
enum QsigStatus qsig_p2_forging_bound(double s_v, size_t l, double *out);

/**
 * Returns `QSIG_STATUS_VACUOUS_BOUND` when the bound carries no information.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum QsigStatus qsig_mqds_forging_bound(double p_min,
                                        double p_usd,
                                        double delta,
                                        double s_v,
                                        size_t l,
                                        double *out);

/**
 * # Safety
 * `out` must be valid for a write.
 */
enum QsigStatus qsig_mqds_repudiation_bound(double p_usd,
                                            double s_a,
                                            double s_v,
                                            size_t l,
                                            double *out);

/**
 * Majority vote over `n >= 3` votes (`true` = message valid).
 *
 * # Safety
 * `votes` must point to `n` readable bools and `verdict` be valid for a write.
 */
enum QsigStatus qsig_resolve_dispute(const bool *votes, size_t n, enum QsigVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSIG_H */
