#ifndef FORMALITY_H
#define FORMALITY_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Kind of a parsed document.
typedef enum FormalityKind {
  FORMALITY_KIND_DGL = 0,
  FORMALITY_KIND_LINF = 1,
  FORMALITY_KIND_CDGA = 2,
} FormalityKind;

// Result codes shared by every entry point.
typedef enum FormalityStatus {
  FORMALITY_STATUS_OK = 0,
  // A required pointer argument was null.
  FORMALITY_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  FORMALITY_STATUS_INVALID_UTF8 = 2,
  // The document or a numeric argument did not parse.
  FORMALITY_STATUS_PARSE = 3,
  // The input parsed but the computation rejected it.
  FORMALITY_STATUS_KERNEL = 4,
  // The computation could not decide the question.
  FORMALITY_STATUS_UNDECIDED = 5,
  // A consistency check ran and failed.
  FORMALITY_STATUS_CHECK_FAILED = 6,
  // A Rust panic was caught at the boundary.
  FORMALITY_STATUS_PANIC = 7,
} FormalityStatus;

// Parsed presentation document.
typedef struct FormalityDocument FormalityDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next call into the library from the same thread.
const char *formality_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void formality_string_free(char *s);

// Parses a document from NUL-terminated text.
//
// # Safety
// `text` must be a valid C string and `out` a valid pointer.
enum FormalityStatus formality_document_parse(const char *text, struct FormalityDocument **out);

// Releases a document. Null is ignored.
//
// # Safety
// `doc` must come from [`formality_document_parse`] and not have been freed.
void formality_document_free(struct FormalityDocument *doc);

// # Safety
// `doc` must be a live handle and `out` a valid pointer.
enum FormalityStatus formality_document_kind(const struct FormalityDocument *doc,
                                             enum FormalityKind *out);

// Canonical text of a document.
//
// # Safety
// `doc` must be a live handle and `out` a valid pointer.
enum FormalityStatus formality_document_to_text(const struct FormalityDocument *doc, char **out);

// Runs the consistency checks. Returns `CheckFailed` with the failing
// lines as the error message when a check fails.
//
// # Safety
// `doc` must be a live handle.
enum FormalityStatus formality_document_check(const struct FormalityDocument *doc);

// Dimension of homology in one degree.
//
// # Safety
// `doc` must be a live handle and `out` a valid pointer.
enum FormalityStatus formality_homology_dimension(const struct FormalityDocument *doc,
                                                  int32_t degree,
                                                  uintptr_t *out);

// Formality verdict for a comma-separated list of classes, written as a
// JSON report. The status reflects the verdict: `Undecided` when
// inconclusive, `Ok` otherwise.
//
// # Safety
// `doc` must be a live handle, `classes` a valid C string and `out` a
// valid pointer.
enum FormalityStatus formality_formality_report(const struct FormalityDocument *doc,
                                                const char *classes,
                                                char **out);

// Graded determinant of a row-major `size × size` matrix of rational
// entries written as C strings (`"3"`, `"-1/2"`). The result is written as
// a string of the same form.
//
// # Safety
// `entries` must hold `size * size` valid C strings, `degrees` must hold
// `size` integers and `out` must be a valid pointer.
enum FormalityStatus formality_graded_det(const char *const *entries,
                                          const int32_t *degrees,
                                          uintptr_t size,
                                          char **out);

// Intrinsic coformality of a product of odd spheres. `out` receives 1 for
// yes and 0 for no; on no, `witness` (if non-null) receives the 0-based
// index of the sphere whose dimension is the sum of others minus one.
//
// # Safety
// `dims` must hold `len` integers; `out` must be valid; `witness` may be
// null.
enum FormalityStatus formality_intrinsic_coformal(const int64_t *dims,
                                                  uintptr_t len,
                                                  int32_t *out,
                                                  uintptr_t *witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORMALITY_H */
