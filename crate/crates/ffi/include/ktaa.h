#ifndef KTAA_H
#define KTAA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KtaaAuthOutcome {
  KTAA_AUTH_OUTCOME_ACCEPTED = 0,
  KTAA_AUTH_OUTCOME_INVALID_PROOF = 1,
  KTAA_AUTH_OUTCOME_DUPLICATE_TAG = 2,
} KtaaAuthOutcome;

typedef enum KtaaStatus {
  KTAA_STATUS_OK = 0,
  KTAA_STATUS_NULL_POINTER = 1,
  KTAA_STATUS_INVALID_UTF8 = 2,
  KTAA_STATUS_INVALID_ARGUMENT = 3,
  KTAA_STATUS_NOT_FOUND = 4,
  /**
   * A proof or credential was rejected.
   */
  KTAA_STATUS_REJECTED = 5,
  KTAA_STATUS_LIMIT_REACHED = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  KTAA_STATUS_PANIC = 7,
} KtaaStatus;

/**
 * Opaque system handle.
 */
typedef struct KtaaSystem KtaaSystem;

/**
 * Headline numbers of the cost estimate.
 */
typedef struct KtaaEstimate {
  double witness_n;
  double m_size_l;
  double pi1_bytes;
  double comparison_l;
  double pi2_bytes;
  double ratio;
} KtaaEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or an empty string. The
 * pointer stays valid until the next call on the same thread.
 */
const char *ktaa_last_error(void);

/**
 * Create a system for a toy preset (`toy-27`, `toy-125`).
 *
 * # Safety
 * `preset` must be a valid C string; `out` must be writable.
 */
enum KtaaStatus ktaa_system_new(const char *preset, uint64_t seed, struct KtaaSystem **out);

/**
 * # Safety
 * `sys` must come from `ktaa_system_new` and not be used afterwards. Null is ignored.
 */
void ktaa_system_free(struct KtaaSystem *sys);

/**
 * Register an access provider allowing `k` authentications per user.
 *
 * # Safety
 * `sys` must be a live handle and `ap` a valid C string.
 */
enum KtaaStatus ktaa_ap_setup(struct KtaaSystem *sys, const char *ap, size_t k);

/**
 * Create a user and run Join; writes the membership tag to `tau_out` when non-null.
 *
 * # Safety
 * `sys` must be a live handle, `user` a valid C string, `tau_out` null or writable.
 */
enum KtaaStatus ktaa_join(struct KtaaSystem *sys, const char *user, uint64_t *tau_out);

/**
 * # Safety
 * `sys` must be a live handle; `user` and `ap` valid C strings.
 */
enum KtaaStatus ktaa_grant(struct KtaaSystem *sys, const char *user, const char *ap);

/**
 * # Safety
 * `sys` must be a live handle; `user` and `ap` valid C strings.
 */
enum KtaaStatus ktaa_revoke(struct KtaaSystem *sys, const char *user, const char *ap);

/**
 * One authentication. With `over` the user replays its last tag base past
 * the limit, which the AP logs and tracing then catches.
 *
 * # Safety
 * `sys` must be a live handle; `user` and `ap` valid C strings; `out` writable.
 */
enum KtaaStatus ktaa_authenticate(struct KtaaSystem *sys,
                                  const char *user,
                                  const char *ap,
                                  bool over,
                                  enum KtaaAuthOutcome *out);

/**
 * Public tracing over an AP's log. Writes a newly allocated, comma-separated
 * list of traced identities (`gm` for an off-list key); empty when nobody
 * is traced.
 *
 * # Safety
 * `sys` must be a live handle; `ap` a valid C string; `out` writable.
 */
enum KtaaStatus ktaa_trace(struct KtaaSystem *sys, const char *ap, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void ktaa_string_free(char *s);

/**
 * Cost estimate at security level 80 or 128.
 *
 * # Safety
 * `out` must be writable.
 */
enum KtaaStatus ktaa_estimate(uint32_t level, struct KtaaEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KTAA_H */
