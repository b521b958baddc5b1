/* C interface for the random-walks-on-growing-graphs toolkit. */

#ifndef RWOGG_H
#define RWOGG_H

/* Generated by cbindgen from rwogg-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum rwogg_status {
  RWOGG_STATUS_OK = 0,
  RWOGG_STATUS_NULL_POINTER = 1,
  RWOGG_STATUS_INVALID_UTF8 = 2,
  RWOGG_STATUS_INVALID_DESCRIPTOR = 3,
  RWOGG_STATUS_INVALID_ARGUMENT = 4,
  RWOGG_STATUS_RESOURCE_CAP = 5,
  RWOGG_STATUS_RUNTIME_ERROR = 6,
  // Verification ran and failed (dominance violated).
  RWOGG_STATUS_VERIFICATION_FAILED = 7,
} rwogg_status;

// Recurrence verdict encoded for C callers.
typedef enum rwogg_verdict {
  RWOGG_VERDICT_RECURRENT = 0,
  RWOGG_VERDICT_TRANSIENT = 1,
  RWOGG_VERDICT_UNDECIDED = 2,
} rwogg_verdict;

// Opaque graph-family handle.
typedef struct rwogg_family rwogg_family;

// Opaque duration-schedule handle.
typedef struct rwogg_schedule rwogg_schedule;

// Opaque return-series handle.
typedef struct rwogg_series rwogg_series;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread; valid until the next
// failing call from the same thread.
const char *rwogg_last_error_message(void);

// Parses a family descriptor such as `karytree:k=2,lambda=1`,
// `box:d=4`, `hypercube`, or `star:M=linear,gamma=0,start=leaf`.
//
// # Safety
// `descriptor` must point to a NUL-terminated string and `out` to writable
// storage for one pointer.
enum rwogg_status rwogg_family_parse(const char *descriptor, struct rwogg_family **out);

// Overrides the family's state-count cap.
//
// # Safety
// `family` must be a live handle from `rwogg_family_parse`.
enum rwogg_status rwogg_family_set_cap(struct rwogg_family *family, uint64_t cap);

// # Safety
// `family` must be a handle from `rwogg_family_parse`, not yet freed.
void rwogg_family_free(struct rwogg_family *family);

// Parses a schedule descriptor such as `explicit:3,5,0,2` or
// `symbolic:base=2,a=1,b=1,d1=4`.
//
// # Safety
// `descriptor` must point to a NUL-terminated string and `out` to writable
// storage for one pointer.
enum rwogg_status rwogg_schedule_parse(const char *descriptor, struct rwogg_schedule **out);

// # Safety
// `schedule` must be a handle from `rwogg_schedule_parse`, not yet freed.
void rwogg_schedule_free(struct rwogg_schedule *schedule);

// Exact return-probability series for `t = 0..=horizon`; `lumped` selects
// the exact projected chain where one exists.
//
// # Safety
// `family` and `schedule` must be live handles; `out` must be writable.
enum rwogg_status rwogg_run_exact(const struct rwogg_family *family,
                                  const struct rwogg_schedule *schedule,
                                  uint64_t horizon,
                                  bool lumped,
                                  struct rwogg_series **out);

// Empirical return frequencies from `walkers` independent trajectories;
// deterministic for a fixed seed.
//
// # Safety
// `family` and `schedule` must be live handles; `out` must be writable.
enum rwogg_status rwogg_run_monte_carlo(const struct rwogg_family *family,
                                        const struct rwogg_schedule *schedule,
                                        uint64_t horizon,
                                        uint64_t walkers,
                                        uint64_t seed,
                                        bool lumped,
                                        struct rwogg_series **out);

// Number of recorded time points (horizon + 1).
//
// # Safety
// `series` must be a live handle (NULL yields 0).
uint64_t rwogg_series_len(const struct rwogg_series *series);

// `R(t)`; NaN when out of range.
//
// # Safety
// `series` must be a live handle (NULL yields NaN).
double rwogg_series_return_prob(const struct rwogg_series *series, uint64_t t);

// Partial sum `S(t) = sum_{i=1..t} R(i)`; NaN when out of range.
//
// # Safety
// `series` must be a live handle (NULL yields NaN).
double rwogg_series_partial_sum(const struct rwogg_series *series, uint64_t t);

// The phase governing the transition out of `t`; 0 when out of range.
//
// # Safety
// `series` must be a live handle (NULL yields 0).
uint32_t rwogg_series_phase(const struct rwogg_series *series, uint64_t t);

// The series as CSV (`t,R,S,phase`), newly allocated; free with
// `rwogg_string_free`.
//
// # Safety
// `series` must be a live handle; `out` must be writable.
enum rwogg_status rwogg_series_to_csv(const struct rwogg_series *series, char **out);

// # Safety
// `series` must be a handle from a run call, not yet freed.
void rwogg_series_free(struct rwogg_series *series);

// Classifies the pair and writes the verdict; the full JSON report
// (verdict, criterion, series term, notes) is available through
// `rwogg_classify_json`.
//
// # Safety
// `family` and `schedule` must be live handles; `out` must be writable.
enum rwogg_status rwogg_classify(const struct rwogg_family *family,
                                 const struct rwogg_schedule *schedule,
                                 enum rwogg_verdict *out);

// Full classification report as a JSON string; free with
// `rwogg_string_free`.
//
// # Safety
// `family` and `schedule` must be live handles; `out` must be writable.
enum rwogg_status rwogg_classify_json(const struct rwogg_family *family,
                                      const struct rwogg_schedule *schedule,
                                      char **out);

// Closed-form stationary origin mass `p(n)`, where the family has one.
//
// # Safety
// `family` must be a live handle; `out` must be writable.
enum rwogg_status rwogg_stationary_origin_mass(const struct rwogg_family *family,
                                               uint32_t level,
                                               double *out);

// Measured even mixing time of the level-`n` chain at `epsilon`.
//
// # Safety
// `family` must be a live handle; `out` must be writable.
enum rwogg_status rwogg_even_mixing_time(const struct rwogg_family *family,
                                         uint32_t level,
                                         double epsilon,
                                         uint64_t *out);

// Exact dominance verification: `fast` must grow at least as fast as
// `slow` prefix-wise; writes `max_t (R_fast - R_slow)` and returns
// `VerificationFailed` when it exceeds the tolerance.
//
// # Safety
// All handles must be live; `out_max_violation` must be writable.
enum rwogg_status rwogg_verify_lhagg_exact(const struct rwogg_family *family,
                                           const struct rwogg_schedule *fast,
                                           const struct rwogg_schedule *slow,
                                           uint64_t horizon,
                                           double tolerance,
                                           double *out_max_violation);

// Trajectory-coupling verification; writes the pathwise violation count
// (zero for a correct coupling). `broken` runs the negative control.
//
// # Safety
// All handles must be live; `out_violations` must be writable.
enum rwogg_status rwogg_verify_coupling_sim(const struct rwogg_family *family,
                                            const struct rwogg_schedule *fast,
                                            const struct rwogg_schedule *slow,
                                            uint64_t horizon,
                                            uint64_t trials,
                                            uint64_t seed,
                                            bool broken,
                                            uint64_t *out_violations);

// # Safety
// `s` must be a string returned by this library, not yet freed.
void rwogg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RWOGG_H */
