#ifndef IFTT_PIN_H
#define IFTT_PIN_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IfttMode {
  IFTT_MODE_CLASSIC = 0,
  IFTT_MODE_SELF_CAL = 1,
} IfttMode;

typedef enum IfttPolicy {
  IFTT_POLICY_RANDOM_BALANCED = 0,
  IFTT_POLICY_BISECT = 1,
} IfttPolicy;

typedef enum IfttStatus {
  IFTT_STATUS_OK = 0,
  IFTT_STATUS_NULL_POINTER = 1,
  IFTT_STATUS_INVALID_CONFIG = 2,
  IFTT_STATUS_OUT_OF_RANGE = 3,
  IFTT_STATUS_INVALID_COLORING = 4,
  IFTT_STATUS_INVALID_STATE = 5,
  IFTT_STATUS_PARSE = 6,
  IFTT_STATUS_UTF8 = 7,
  IFTT_STATUS_REPLAY_MISMATCH = 8,
  IFTT_STATUS_INTERNAL = 9,
} IfttStatus;

typedef enum IfttSessionStatus {
  IFTT_SESSION_STATUS_IN_PROGRESS = 0,
  IFTT_SESSION_STATUS_ALL_INCONSISTENT = 1,
  IFTT_SESSION_STATUS_CAPPED = 2,
  IFTT_SESSION_STATUS_COMPLETE = 3,
} IfttSessionStatus;

// Opaque belief handle for driving the engine directly.
typedef struct IfttBelief IfttBelief;

// Opaque session handle.
typedef struct IfttSession IfttSession;

typedef struct IfttConfig {
  enum IfttMode mode;
  uintptr_t n_buttons;
  uintptr_t pin_length;
  uint64_t seed;
  enum IfttPolicy policy;
  bool carryover;
  uintptr_t click_cap;
} IfttConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into this library on the same thread.
const char *iftt_last_error(void);

// Defaults for a mode: 9 buttons (2 for classic), 4 digits, seed 0,
// balanced random colorings, carryover on, 200-click cap.
struct IfttConfig iftt_config_default(enum IfttMode mode);

// # Safety
// `config` must point to a valid config and `out` to writable storage.
enum IfttStatus iftt_session_new(const struct IfttConfig *config, struct IfttSession **out);

// Rebuilds a session by replaying a transcript document.
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum IfttStatus iftt_session_from_transcript(const char *json, struct IfttSession **out);

// # Safety
// `session` must come from this library and not be used afterwards.
void iftt_session_free(struct IfttSession *session);

// # Safety
// `session` must be a live handle.
enum IfttStatus iftt_session_click(struct IfttSession *session, uintptr_t button);

// # Safety
// `session` must be a live handle.
enum IfttStatus iftt_session_reset(struct IfttSession *session);

// # Safety
// `session` must be a live handle and `out` writable.
enum IfttStatus iftt_session_status(const struct IfttSession *session, enum IfttSessionStatus *out);

// Digits committed so far.
//
// # Safety
// `session` must be a live handle and `out` writable.
enum IfttStatus iftt_session_committed_count(const struct IfttSession *session, uintptr_t *out);

// Current coloring as ten `Y`/`G` letters, digit 0 first.
//
// # Safety
// `session` must be a live handle and `out` writable.
enum IfttStatus iftt_session_coloring(const struct IfttSession *session, char **out);

// Display state as JSON. Free the result with `iftt_string_free`.
//
// # Safety
// `session` must be a live handle and `out` writable.
enum IfttStatus iftt_session_view_json(const struct IfttSession *session, char **out);

// Transcript document as JSON. Free the result with `iftt_string_free`.
//
// # Safety
// `session` must be a live handle and `out` writable.
enum IfttStatus iftt_session_export_transcript(const struct IfttSession *session, char **out);

// # Safety
// `out` must be writable.
enum IfttStatus iftt_belief_new(uintptr_t n_buttons, struct IfttBelief **out);

// # Safety
// `belief` must come from this library and not be used afterwards.
void iftt_belief_free(struct IfttBelief *belief);

// Applies one click. `coloring` is ten `Y`/`G` letters, digit 0 first.
//
// # Safety
// `belief` must be a live handle, `coloring` nul-terminated.
enum IfttStatus iftt_belief_apply_click(struct IfttBelief *belief,
                                        const char *coloring,
                                        uintptr_t button);

// Consistent digits as a bitmask, bit `d` for digit `d`.
//
// # Safety
// `belief` must be a live handle and `out` writable.
enum IfttStatus iftt_belief_consistent_mask(const struct IfttBelief *belief, uint16_t *out);

// The single remaining digit, or -1 while zero or several remain.
//
// # Safety
// `belief` must be a live handle and `out` writable.
enum IfttStatus iftt_belief_inferred_digit(const struct IfttBelief *belief, int32_t *out);

// Cracks a transcript document. Writes the report JSON to `out` and
// whether the PIN was recovered uniquely to `unique` (may be null).
//
// # Safety
// `json` must be nul-terminated and `out` writable.
enum IfttStatus iftt_crack_transcript_json(const char *json, char **out, bool *unique);

// Number of valid button-to-color mappings for `n_buttons` buttons.
//
// # Safety
// `out` must be writable.
enum IfttStatus iftt_count_valid_mappings(uintptr_t n_buttons, uint64_t *out);

// # Safety
// `text` must come from this library, or be null.
void iftt_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IFTT_PIN_H */
