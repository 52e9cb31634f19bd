#ifndef MATCHDIST_H
#define MATCHDIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of the C interface.
 */
typedef enum MdStatus {
  MD_STATUS_OK = 0,
  MD_STATUS_NULL_POINTER = 1,
  MD_STATUS_INVALID_UTF8 = 2,
  MD_STATUS_PARSE_ERROR = 3,
  MD_STATUS_INVALID_ARGUMENT = 4,
  MD_STATUS_CONTRACT_VIOLATION = 5,
  MD_STATUS_PANIC = 6,
} MdStatus;

/**
 * A parsed graded presentation.
 */
typedef struct MdPresentation MdPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses presentation text in the `bpres` format into a new handle.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum MdStatus md_presentation_parse(const char *text, struct MdPresentation **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from [`md_presentation_parse`] and not be freed twice.
 */
void md_presentation_free(struct MdPresentation *p);

/**
 * Number of generators, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t md_presentation_num_generators(const struct MdPresentation *p);

/**
 * Number of relations, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t md_presentation_num_relations(const struct MdPresentation *p);

/**
 * Exact matching distance. `threads = 0` uses the default pool.
 * `value_out` receives the distance; `witness_json_out` may be null.
 *
 * # Safety
 * Handles must be live; out-pointers must be valid or, where allowed, null.
 */
enum MdStatus md_exact_distance(const struct MdPresentation *a,
                                const struct MdPresentation *b,
                                uint32_t threads,
                                char **value_out,
                                char **witness_json_out);

/**
 * Grid lower bound on `grid_s` slopes times `grid_t` offsets.
 * `slice_json_out` may be null.
 *
 * # Safety
 * Handles must be live; out-pointers must be valid or, where allowed, null.
 */
enum MdStatus md_approx_distance(const struct MdPresentation *a,
                                 const struct MdPresentation *b,
                                 size_t grid_s,
                                 size_t grid_t,
                                 char **value_out,
                                 char **slice_json_out);

/**
 * Barcode of a presentation on the slice `y = s·x + t`, one `birth death`
 * line per bar in weighted slice coordinates.
 *
 * # Safety
 * `p` must be live, `s` and `t` nul-terminated, `bars_out` valid.
 */
enum MdStatus md_slice_diagram(const struct MdPresentation *p,
                               const char *s,
                               const char *t,
                               char **bars_out);

/**
 * Bottleneck distance between two barcodes given as `birth death` lines.
 *
 * # Safety
 * Inputs must be nul-terminated; `value_out` must be valid.
 */
enum MdStatus md_bottleneck(const char *bars_a, const char *bars_b, char **value_out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void md_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *md_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *md_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MATCHDIST_H */
