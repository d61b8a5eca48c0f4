#ifndef CHI2QEC_H
#define CHI2QEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

// Status codes returned by every fallible call.
typedef enum Chi2Status {
  CHI2_STATUS_OK = 0,
  CHI2_STATUS_NULL_POINTER = 1,
  CHI2_STATUS_INVALID_UTF8 = 2,
  CHI2_STATUS_INVALID_ARGUMENT = 3,
  CHI2_STATUS_UNKNOWN_NAME = 4,
  // The computation ran but a verdict failed (KL, recovery, bound).
  CHI2_STATUS_VERIFICATION_FAILED = 5,
  // A library error other than a usage error.
  CHI2_STATUS_COMPUTATION_FAILED = 6,
  CHI2_STATUS_PANIC = 7,
} Chi2Status;

// Opaque code handle.
typedef struct Chi2Code Chi2Code;

// Code parameters `(N, n, q, b, k)`.
typedef struct Chi2CodeParams {
  uint32_t size;
  uint32_t n;
  uint32_t q;
  uint32_t b;
  uint32_t k;
} Chi2CodeParams;

// Summary of a Knill-Laflamme check.
typedef struct Chi2KlSummary {
  bool passed;
  uint32_t error_count;
  double max_offdiag_residual;
  double max_distortion_residual;
} Chi2KlSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string that must not be freed.
const char *chi2qec_version(void);

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next chi2qec call on the same thread.
const char *chi2qec_last_error(void);

// Releases a string returned by the library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void chi2qec_string_free(char *s);

// Builds a code by name (`pcc`, `eecc`, `bc`, `bc2mode`) and size `N`.
//
// # Safety
// `name` must be a NUL-terminated string and `out_code` writable.
enum Chi2Status chi2qec_code_new(const char *name, uint32_t size, struct Chi2Code **out_code);

// Releases a code handle. NULL is ignored.
//
// # Safety
// `code` must come from [`chi2qec_code_new`] and not have been freed.
void chi2qec_code_free(struct Chi2Code *code);

// # Safety
// `code` must be a live handle and `params` writable.
enum Chi2Status chi2qec_code_params(const struct Chi2Code *code, struct Chi2CodeParams *params);

// Logical dimension and code rate `k log2 b / (n log2 q)`.
//
// # Safety
// `code` must be a live handle; `dim` and `rate` writable.
enum Chi2Status chi2qec_code_summary(const struct Chi2Code *code, uint32_t *dim, double *rate);

// Codewords and metadata as JSON.
//
// # Safety
// `code` must be a live handle and `json` writable.
enum Chi2Status chi2qec_code_to_json(const struct Chi2Code *code, char **json);

// Knill-Laflamme check. `errors` is `lowest-order`, `xi<m>`,
// `xi<m>:loss|gain|dephasing` or `ad[<m>]`. Returns
// `VerificationFailed` when the condition does not hold; `summary` is
// filled either way. `json` may be NULL.
//
// # Safety
// `code` must be a live handle, `errors` NUL-terminated, `summary`
// writable, and `json` NULL or writable.
enum Chi2Status chi2qec_kl_check(const struct Chi2Code *code,
                                 const char *errors,
                                 double gamma,
                                 double tolerance,
                                 struct Chi2KlSummary *summary,
                                 char **json);

// Syndrome table of the code as CSV (`error_label,p,q`).
//
// # Safety
// `code` must be a live handle and `csv` writable.
enum Chi2Status chi2qec_syndrome_table_csv(const struct Chi2Code *code, char **csv);

// Recovery of `trials` seeded random logical states after `error`.
// Writes the smallest fidelity; returns `VerificationFailed` when it is
// below `1 - tolerance`.
//
// # Safety
// `code` must be a live handle, `error` NUL-terminated, `min_fidelity`
// writable.
enum Chi2Status chi2qec_recovery_trials(const struct Chi2Code *code,
                                        const char *error,
                                        uint32_t trials,
                                        uint64_t seed,
                                        double tolerance,
                                        double *min_fidelity);

// Smallest `n` satisfying the rotation bound for `(q, b, k, t)`, searched
// up to `max_n`.
//
// # Safety
// `n` must be writable.
enum Chi2Status chi2qec_rotation_min_n(uint32_t q,
                                       uint32_t b,
                                       uint32_t k,
                                       uint32_t t,
                                       uint32_t max_n,
                                       uint32_t *n);

// Whether the loss bound `(1 + 3n) b^k <= (4q - 3)^n` holds.
//
// # Safety
// `holds` must be writable.
enum Chi2Status chi2qec_loss_bound_holds(uint32_t n,
                                         uint32_t q,
                                         uint32_t b,
                                         uint32_t k,
                                         bool *holds);

// Evaluates one acceptance criterion (1..=9), or all of them when
// `criterion` is 0, and writes the JSON list of results. Returns
// `VerificationFailed` when any evaluated criterion fails.
//
// # Safety
// `json` must be writable.
enum Chi2Status chi2qec_report(uint32_t criterion, uint64_t seed, char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHI2QEC_H */
