#ifndef FOREST_BALANCE_H
#define FOREST_BALANCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum FbStatus {
  FB_STATUS_OK = 0,
  FB_STATUS_NULL_POINTER = 1,
  FB_STATUS_INVALID_INPUT = 2,
  FB_STATUS_PARITY = 3,
  FB_STATUS_SIGN_SEARCH_FAILURE = 4,
  FB_STATUS_REFUSED = 5,
  FB_STATUS_PRECONDITION = 6,
  FB_STATUS_PARSE = 7,
  FB_STATUS_IO = 8,
  FB_STATUS_INTERNAL = 9,
} FbStatus;

typedef enum FbStrategy {
  FB_STRATEGY_AUTO = 0,
  FB_STRATEGY_INTERPOLATE_ONLY = 1,
  FB_STRATEGY_GREEDY_STAR = 2,
  FB_STRATEGY_LOCAL_SEARCH = 3,
} FbStrategy;

typedef enum FbCertificate {
  FB_CERTIFICATE_OPTIMAL = 0,
  FB_CERTIFICATE_INTERPOLATION = 1,
  FB_CERTIFICATE_DELTA_PLUS_ONE = 2,
  FB_CERTIFICATE_GREEDY_STAR = 3,
  FB_CERTIFICATE_HEURISTIC = 4,
} FbCertificate;

// A ±1 colouring of `K_n`.
typedef struct FbColouring FbColouring;

// A forest on `n` labelled vertices.
typedef struct FbForest FbForest;

// The outcome of `fb_solve`.
typedef struct FbSolveResult FbSolveResult;

// Solver settings; start from `fb_solve_options_default`.
typedef struct FbSolveOptions {
  uint64_t seed;
  size_t max_restarts;
  size_t sample_budget;
  size_t exact_threshold;
  enum FbStrategy strategy;
} FbSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread; never free it.
const char *fb_last_error_message(void);

// A uniformly random colouring with exactly half the edges red.
//
// # Safety
// `out` must be valid for writes.
enum FbStatus fb_colouring_random_balanced(size_t n, uint64_t seed, struct FbColouring **out);

// The two-class colouring that forces spanning-star imbalance `(n - 2)/2`; `n % 4 == 0`.
//
// # Safety
// `out` must be valid for writes.
enum FbStatus fb_colouring_c0(size_t n, struct FbColouring **out);

// Parses the text format: `n`, then row `i` holds `i` characters `R`/`B`.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be valid for writes.
enum FbStatus fb_colouring_from_text(const char *source, struct FbColouring **out);

// # Safety
// `c` must come from an `fb_colouring_*` constructor and not be used afterwards. Null is ignored.
void fb_colouring_free(struct FbColouring *c);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t fb_colouring_n(const struct FbColouring *c);

// Writes `+1` (red) or `-1` (blue) for the edge `ij`.
//
// # Safety
// `c` must be a live handle and `sign` valid for writes.
enum FbStatus fb_colouring_sign(const struct FbColouring *c, size_t i, size_t j, int32_t *sign);

// Whether the colour sum over all edges is zero. False for a null handle.
//
// # Safety
// `c` must be null or a live handle.
bool fb_colouring_is_balanced(const struct FbColouring *c);

// Builds a forest from `edge_count` pairs stored flat in `edges` (`2 * edge_count` entries).
//
// # Safety
// `edges` must point to `2 * edge_count` readable values (or be null when
// `edge_count` is 0); `out` must be valid for writes.
enum FbStatus fb_forest_from_edges(size_t n,
                                   const size_t *edges,
                                   size_t edge_count,
                                   struct FbForest **out);

// Parses the text format: `n m`, then `m` lines `u v`.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be valid for writes.
enum FbStatus fb_forest_from_text(const char *source, struct FbForest **out);

// # Safety
// `f` must come from an `fb_forest_*` constructor and not be used afterwards. Null is ignored.
void fb_forest_free(struct FbForest *f);

// # Safety
// `f` must be null or a live handle.
size_t fb_forest_n(const struct FbForest *f);

// # Safety
// `f` must be null or a live handle.
size_t fb_forest_max_degree(const struct FbForest *f);

struct FbSolveOptions fb_solve_options_default(void);

// Finds a low-imbalance embedding of `forest` into `colouring`.
//
// # Safety
// Handles must be live; `options` may be null for defaults; `out` must be valid for writes.
enum FbStatus fb_solve(const struct FbForest *forest,
                       const struct FbColouring *colouring,
                       const struct FbSolveOptions *options,
                       struct FbSolveResult **out);

// # Safety
// `r` must come from `fb_solve` and not be used afterwards. Null is ignored.
void fb_solve_result_free(struct FbSolveResult *r);

// `|sum|` of the embedding, or 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
uint64_t fb_solve_result_achieved(const struct FbSolveResult *r);

// Signed colour sum of the embedding, or 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
int64_t fb_solve_result_sum(const struct FbSolveResult *r);

// # Safety
// `r` must be null or a live handle.
bool fb_solve_result_within_theorem(const struct FbSolveResult *r);

// The guarantee class behind the result; `Heuristic` for a null handle.
//
// # Safety
// `r` must be null or a live handle.
enum FbCertificate fb_solve_result_certificate(const struct FbSolveResult *r);

// Copies the vertex map (forest vertex `v` goes to host vertex `map[v]`) into `map`.
//
// # Safety
// `r` must be a live handle; `map` must be valid for `len` writes.
enum FbStatus fb_solve_result_map(const struct FbSolveResult *r, size_t *map, size_t len);

// The guarantee `Δ/2 + 9` (for `Δ >= n/2` or `Δ <= 15`) or its square-root form otherwise.
double fb_theorem3_bound(size_t n, size_t max_degree);

// Exact minimum imbalance by enumeration, refused above `max_n` vertices.
// `map` may be null; otherwise it receives a witness and must hold `n` entries.
//
// # Safety
// Handles must be live; `value` must be valid for writes; `map` null or valid for `n` writes.
enum FbStatus fb_exact_min_imbalance(const struct FbForest *forest,
                                     const struct FbColouring *colouring,
                                     size_t max_n,
                                     uint64_t *value,
                                     size_t *map);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOREST_BALANCE_H */
