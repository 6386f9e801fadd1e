#ifndef GAPFORGE_H
#define GAPFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_ARGUMENT = 1,
  GF_STATUS_INPUT_ERROR = 2,
  GF_STATUS_INVARIANT_VIOLATION = 3,
  GF_STATUS_SIZE_GUARD = 4,
  GF_STATUS_PANIC = 5,
} GfStatus;

// Opaque handle to a built reduction (graph plus its gadget index).
typedef struct GfReduction GfReduction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Owned by the
// library; valid until the next call.
const char *gf_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void gf_string_free(char *s);

// Library version as a static string.
const char *gf_version(void);

// Builds a reduction from MAX-E3-LIN2 text: the instance is balanced to
// right-hand side `b` (0 gives the undirected graph, 1 the directed one,
// using `lambda` such as `"1/8"`; `lambda` may be null for `b = 0`).
//
// # Safety
// String arguments must be nul-terminated; `out` must be writable.
enum GfStatus gf_reduction_from_e3lin2(const char *text,
                                       uint8_t b,
                                       uint64_t seed,
                                       const char *lambda,
                                       struct GfReduction **out);

// Loads a reduction file (as written by `forge to-tsp` / `to-atsp`).
//
// # Safety
// `json` must be nul-terminated; `out` must be writable.
enum GfStatus gf_reduction_from_json(const char *json, struct GfReduction **out);

// # Safety
// `h` must be null or a handle from this library that was not freed yet.
void gf_reduction_free(struct GfReduction *h);

// Reduction file JSON.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum GfStatus gf_reduction_to_json(const struct GfReduction *h, char **out);

// Vertex and edge counts of the reduction graph.
//
// # Safety
// `h` must be a live handle; the output pointers must be writable.
enum GfStatus gf_reduction_size(const struct GfReduction *h, size_t *vertices, size_t *edges);

// Builds a tour from an assignment file (`{"original": [...]}` or
// `{"hybrid": [...]}`). Writes `{"summary": {...}, "tour": {...}}`.
//
// # Safety
// `h` must be a live handle, `assignment` nul-terminated, `out` writable.
enum GfStatus gf_reduction_tour(const struct GfReduction *h, const char *assignment, char **out);

// Extracts an assignment from tour JSON and writes
// `{"hybrid": [...], "unsat", "dishonest_vars", "tour_cost", "allowance"}`.
//
// # Safety
// `h` must be a live handle, `tour` nul-terminated, `out` writable.
enum GfStatus gf_reduction_extract(const struct GfReduction *h, const char *tour, char **out);

// Per-gadget credit report of a tour.
//
// # Safety
// `h` must be a live handle, `tour` nul-terminated, `out` writable.
enum GfStatus gf_reduction_audit(const struct GfReduction *h, const char *tour, char **out);

// Runs the end-to-end pipeline. `config` is a JSON object whose fields
// default individually (null means all defaults). The report is written
// even when a check fails; the status is then `InvariantViolation`.
//
// # Safety
// `config` must be null or nul-terminated; `out` must be writable.
enum GfStatus gf_pipeline_run(const char *config, char **out);

// Exact tour on a distance matrix JSON (`{"entries": [["0","1/2"], ...]}`).
// `method` 0 is Held-Karp, 1 permutation brute force.
//
// # Safety
// `matrix` must be nul-terminated; `out` must be writable.
enum GfStatus gf_oracle(const char *matrix, uint8_t method, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAPFORGE_H */
