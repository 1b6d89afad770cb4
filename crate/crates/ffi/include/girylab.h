#ifndef GIRYLAB_H
#define GIRYLAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call. One code per library error, plus the
// boundary's own failures.
typedef enum GiryStatus {
  GIRY_STATUS_OK = 0,
  GIRY_STATUS_NULL_POINTER = 1,
  GIRY_STATUS_INVALID_UTF8 = 2,
  GIRY_STATUS_PANIC = 3,
  GIRY_STATUS_PARSE = 10,
  GIRY_STATUS_DUPLICATE_INDEX = 11,
  GIRY_STATUS_NEGATIVE_WEIGHT = 12,
  GIRY_STATUS_MASS_NOT_ONE = 13,
  GIRY_STATUS_INVALID_TAIL = 14,
  GIRY_STATUS_UNSUPPORTED_SET_SHAPE = 15,
  GIRY_STATUS_ENUMERATION_CAP_EXCEEDED = 16,
  GIRY_STATUS_PARTIAL_MAP = 17,
  GIRY_STATUS_TAIL_UNSUPPORTED = 18,
  GIRY_STATUS_PARTIAL_FAMILY = 19,
  GIRY_STATUS_UNKNOWN_SPACE = 20,
  GIRY_STATUS_UNKNOWN_ALGEBRA = 21,
  GIRY_STATUS_PARTIAL_SEQUENCE = 22,
  GIRY_STATUS_OUT_OF_CARRIER = 23,
  GIRY_STATUS_BOUND_EXCEEDED = 24,
  GIRY_STATUS_NOT_AFFINE = 25,
  GIRY_STATUS_NOT_PERMUTATION = 26,
  GIRY_STATUS_INDEX_OUT_OF_RANGE = 27,
  GIRY_STATUS_EMPTY_PART = 28,
  GIRY_STATUS_NOT_A_PARTITION = 29,
  GIRY_STATUS_UNKNOWN_POINT = 30,
  GIRY_STATUS_BROKEN_CHAIN = 31,
  GIRY_STATUS_NORM_NOT_ONE = 32,
  GIRY_STATUS_TYPE_MISMATCH = 33,
  GIRY_STATUS_UNKNOWN_SUITE = 34,
  GIRY_STATUS_BAD_CONFIG = 35,
} GiryStatus;

// A normalized family of complex rational amplitudes.
typedef struct GiryAmp GiryAmp;

// A validated probability distribution on the naturals.
typedef struct GiryDist GiryDist;

// An immutable partition refinement tree.
typedef struct GiryTree GiryTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until
// the next call into the library on this thread; do not free.
const char *girylab_last_error(void);

// Library version as a static string.
const char *girylab_version(void);

// Releases a string returned through a `char **out` parameter.
//
// # Safety
// `s` is null or came from this library and has not been freed.
void girylab_string_free(char *s);

// Evaluates a JSON expression (the CLI `eval` format) and writes the JSON
// result to `out`.
//
// # Safety
// `expr` is a nul-terminated string; `out` is writable.
enum GiryStatus girylab_eval(const char *expr, char **out);

// Runs law suites with a JSON config (null for the defaults), writes the
// JSON report to `out` and whether every law held to `passed`.
//
// # Safety
// `config` is null or nul-terminated; `out` and `passed` are writable.
enum GiryStatus girylab_check(const char *config, char **out, bool *passed);

// Parses and validates a distribution.
//
// # Safety
// `json` is nul-terminated; `out` is writable.
enum GiryStatus girylab_dist_from_json(const char *json, struct GiryDist **out);

// The point mass at `i`.
//
// # Safety
// `out` is writable.
enum GiryStatus girylab_dist_dirac(uint64_t i, struct GiryDist **out);

// Canonical JSON of a distribution.
//
// # Safety
// `d` is a live handle; `out` is writable.
enum GiryStatus girylab_dist_to_json(const struct GiryDist *d, char **out);

// Least index with positive weight, searching at most `cap` indices.
//
// # Safety
// `d` is a live handle; `out` is writable.
enum GiryStatus girylab_dist_min_support(const struct GiryDist *d, uint64_t cap, uint64_t *out);

// Mass of a set given as JSON (`"all"`, `{"finite": [..]}`,
// `{"cofinite": [..]}`, `{"below": n}`), written as an `"n/d"` string.
//
// # Safety
// `d` is a live handle; `set` is nul-terminated; `out` is writable.
enum GiryStatus girylab_dist_ev(const struct GiryDist *d, const char *set, char **out);

// Image under the table `map[0..len]`. Indices at or beyond `len` in the
// support are an error.
//
// # Safety
// `d` is a live handle; `map` points to `len` values; `out` is writable.
enum GiryStatus girylab_dist_pushforward(const struct GiryDist *d,
                                         const uint64_t *map,
                                         size_t len,
                                         struct GiryDist **out);

// Structural equality of two distributions.
//
// # Safety
// Both are live handles.
enum GiryStatus girylab_dist_equal(const struct GiryDist *a, const struct GiryDist *b, bool *out);

// # Safety
// `d` is null or a live handle not used afterwards.
void girylab_dist_free(struct GiryDist *d);

// Parses `{"amplitudes": [[i, "re", "im"], ...]}` and checks the squared
// norm is exactly 1.
//
// # Safety
// `json` is nul-terminated; `out` is writable.
enum GiryStatus girylab_amp_from_json(const char *json, struct GiryAmp **out);

// # Safety
// `a` is a live handle; `out` is writable.
enum GiryStatus girylab_amp_to_json(const struct GiryAmp *a, char **out);

// The probability distribution of squared moduli.
//
// # Safety
// `a` is a live handle; `out` is writable.
enum GiryStatus girylab_amp_to_dist(const struct GiryAmp *a, struct GiryDist **out);

// # Safety
// `a` is null or a live handle not used afterwards.
void girylab_amp_free(struct GiryAmp *a);

// Builds a tree from `{"points": [..], "splits": [..]}`.
//
// # Safety
// `json` is nul-terminated; `out` is writable.
enum GiryStatus girylab_tree_from_json(const char *json, struct GiryTree **out);

// # Safety
// `t` is a live handle; `out` is writable.
enum GiryStatus girylab_tree_to_json(const struct GiryTree *t, char **out);

// Applies one split `{"atom", "left", "right"}` to the deepest level,
// producing a new tree. The input tree is unchanged.
//
// # Safety
// `t` is a live handle; `split` is nul-terminated; `out` is writable.
enum GiryStatus girylab_tree_refine(const struct GiryTree *t,
                                    const char *split,
                                    struct GiryTree **out);

// Number of levels.
//
// # Safety
// `t` is a live handle; `out` is writable.
enum GiryStatus girylab_tree_depth(const struct GiryTree *t, size_t *out);

// Atom index of point `x` at level `n` (levels start at 1).
//
// # Safety
// `t` is a live handle; `x` is nul-terminated; `out` is writable.
enum GiryStatus girylab_tree_atom_of(const struct GiryTree *t,
                                     size_t n,
                                     const char *x,
                                     uint64_t *out);

// Runs every refinement check on the tree; writes the JSON law reports to
// `out` (may be null) and the overall verdict to `passed`.
//
// # Safety
// `t` is a live handle; `passed` is writable; `out` is null or writable.
enum GiryStatus girylab_tree_check(const struct GiryTree *t, char **out, bool *passed);

// # Safety
// `t` is null or a live handle not used afterwards.
void girylab_tree_free(struct GiryTree *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIRYLAB_H */
