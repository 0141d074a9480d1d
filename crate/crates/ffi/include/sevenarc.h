#ifndef SEVENARC_H
#define SEVENARC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum SaStatus {
  SA_STATUS_OK = 0,
  SA_STATUS_NULL_POINTER = 1,
  SA_STATUS_INVALID_ARGUMENT = 2,
  // An element index outside the field.
  SA_STATUS_NOT_IN_FIELD = 3,
  // Zero has no inverse.
  SA_STATUS_NOT_INVERTIBLE = 4,
  // The value does not fit the output type.
  SA_STATUS_OVERFLOW = 5,
  // A panic was caught at the boundary.
  SA_STATUS_INTERNAL = 6,
} SaStatus;

// A finite field GF(p^(s·l)) with elements numbered 0..size.
typedef struct SaField SaField;

// A finished count with its formula comparison.
typedef struct SaReport SaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *sa_last_error_message(void);

// Library version, a static string.
const char *sa_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sa_string_free(char *s);

// Builds GF(p^(s·l)) with p prime.
//
// # Safety
// `out` must be valid for a write.
enum SaStatus sa_field_new(uint32_t p, uint32_t s, uint32_t l, struct SaField **out);

// # Safety
// `f` must come from `sa_field_new` and not have been freed. NULL is ignored.
void sa_field_free(struct SaField *f);

// Number of elements.
//
// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_size(const struct SaField *f, uint32_t *out);

// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_add(const struct SaField *f, uint32_t a, uint32_t b, uint32_t *out);

// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_sub(const struct SaField *f, uint32_t a, uint32_t b, uint32_t *out);

// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_mul(const struct SaField *f, uint32_t a, uint32_t b, uint32_t *out);

// a raised to e.
//
// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_pow(const struct SaField *f, uint32_t a, uint64_t e, uint32_t *out);

// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_inv(const struct SaField *f, uint32_t a, uint32_t *out);

// The i-th power of x -> x^q, q = p^s.
//
// # Safety
// `f` must be a live field handle and `out` valid for a write.
enum SaStatus sa_field_frobenius(const struct SaField *f, uint32_t x, uint32_t i, uint32_t *out);

// Order of PGL(3, q).
//
// # Safety
// `out` must be valid for a write.
enum SaStatus sa_pgl3_order(uint64_t q, uint64_t *out);

// Table value for one of the five listed cycle types as num/den.
//
// # Safety
// `lambda` must be a NUL-terminated string; `num` and `den` valid for writes.
enum SaStatus sa_table1_value(const char *lambda, uint64_t q, int64_t *num, int64_t *den);

// Counts unordered 7-arcs of cycle type `lambda` over GF(q) on `jobs`
// threads (0 for all available).
//
// # Safety
// `lambda` must be a NUL-terminated string and `out` valid for a write.
enum SaStatus sa_count_arcs(uint64_t q, const char *lambda, uint32_t jobs, struct SaReport **out);

// Counts Fano planes of cycle type `lambda` over GF(q).
//
// # Safety
// `lambda` must be a NUL-terminated string and `out` valid for a write.
enum SaStatus sa_fano_census(uint64_t q, const char *lambda, uint32_t jobs, struct SaReport **out);

// # Safety
// `r` must come from this library and not have been freed. NULL is ignored.
void sa_report_free(struct SaReport *r);

// The unordered count.
//
// # Safety
// `r` must be a live report handle and `out` valid for a write.
enum SaStatus sa_report_raw_count(const struct SaReport *r, uint64_t *out);

// 1 if the count agrees with its registered formula, 0 if not, -1 if no
// formula is registered.
//
// # Safety
// `r` must be a live report handle and `out` valid for a write.
enum SaStatus sa_report_match(const struct SaReport *r, int32_t *out);

// The full report as JSON; free with `sa_string_free`.
//
// # Safety
// `r` must be a live report handle and `out` valid for a write.
enum SaStatus sa_report_json(const struct SaReport *r, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SEVENARC_H */
