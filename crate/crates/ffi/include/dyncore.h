#ifndef DYNCORE_H
#define DYNCORE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_ARGUMENT = 1,
  DC_STATUS_INVALID_UTF8 = 2,
  DC_STATUS_PARSE = 3,
  DC_STATUS_SYNTAX = 4,
  DC_STATUS_INVALID_DECOMPOSITION = 5,
  DC_STATUS_CONFIG = 6,
  DC_STATUS_DOMAIN = 7,
  DC_STATUS_ORACLE_REFUSED = 8,
  DC_STATUS_WITNESS = 9,
  DC_STATUS_IO = 10,
  DC_STATUS_OUT_OF_RANGE = 11,
  DC_STATUS_PANIC = 12,
} DcStatus;

typedef enum DcElementKind {
  DC_ELEMENT_KIND_VERTEX = 0,
  DC_ELEMENT_KIND_EDGE = 1,
} DcElementKind;

/**
 * A simple undirected graph.
 */
typedef struct DcGraph DcGraph;

/**
 * A parsed problem expression.
 */
typedef struct DcProblem DcProblem;

/**
 * The outcome of one solver run.
 */
typedef struct DcVerdict DcVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dc_last_error_message(void);

/**
 * Builds a graph on vertices `1..=n` from `edge_count` pairs stored
 * consecutively in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` readable integers (or be null when
 * `edge_count` is 0); `out` must be writable.
 */
enum DcStatus dc_graph_new(uint32_t n,
                           const uint32_t *edges,
                           size_t edge_count,
                           struct DcGraph **out);

/**
 * Parses a graph in PACE `.gr` format.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum DcStatus dc_graph_parse_gr(const char *text, struct DcGraph **out);

/**
 * # Safety
 * `graph` must be null or a handle from this library, not yet freed.
 */
void dc_graph_free(struct DcGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
size_t dc_graph_vertex_count(const struct DcGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
size_t dc_graph_edge_count(const struct DcGraph *graph);

/**
 * Parses a problem expression such as `vertpart(tree,tree)`.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum DcStatus dc_problem_parse(const char *text, struct DcProblem **out);

/**
 * Looks up a named problem: `3col`, `vc=<k>`, `two-trees`, `arb=<l>`.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be writable.
 */
enum DcStatus dc_problem_preset(const char *name, struct DcProblem **out);

/**
 * # Safety
 * `problem` must be null or a handle from this library, not yet freed.
 */
void dc_problem_free(struct DcProblem *problem);

/**
 * Decides `problem` on `graph`. `td_text` is an optional PACE `.td`
 * decomposition (null means min-fill). `threads` of 0 is treated as 1.
 *
 * # Safety
 * `graph` and `problem` must be live handles; `td_text` null or a
 * nul-terminated string; `out` writable.
 */
enum DcStatus dc_solve(const struct DcGraph *graph,
                       const struct DcProblem *problem,
                       const char *td_text,
                       uint32_t threads,
                       bool want_witness,
                       struct DcVerdict **out);

/**
 * Brute-force answer for small graphs (at most 10 vertices, 14 edges).
 *
 * # Safety
 * `graph` and `problem` must be live handles; `out` writable.
 */
enum DcStatus dc_oracle_decide(const struct DcGraph *graph,
                               const struct DcProblem *problem,
                               bool *out);

/**
 * # Safety
 * `verdict` must be null or a handle from this library, not yet freed.
 */
void dc_verdict_free(struct DcVerdict *verdict);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
bool dc_verdict_answer(const struct DcVerdict *verdict);

/**
 * Number of decomposition nodes the solver ran on.
 *
 * # Safety
 * `verdict` must be a live handle.
 */
size_t dc_verdict_nodes(const struct DcVerdict *verdict);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
size_t dc_verdict_width(const struct DcVerdict *verdict);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
size_t dc_verdict_max_states(const struct DcVerdict *verdict);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
size_t dc_verdict_total_states(const struct DcVerdict *verdict);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
double dc_verdict_elapsed_ms(const struct DcVerdict *verdict);

/**
 * Number of witness entries: one per vertex (or edge) of a partition
 * problem answered YES with a witness requested, otherwise 0.
 *
 * # Safety
 * `verdict` must be a live handle.
 */
size_t dc_verdict_witness_len(const struct DcVerdict *verdict);

/**
 * Reads witness entry `index`. For a vertex, `u` is the vertex and `v` is
 * 0. Parts are numbered from 1 in argument order.
 *
 * # Safety
 * `verdict` must be a live handle; the out pointers must be writable.
 */
enum DcStatus dc_verdict_witness_entry(const struct DcVerdict *verdict,
                                       size_t index,
                                       enum DcElementKind *kind,
                                       uint32_t *u,
                                       uint32_t *v,
                                       size_t *part);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNCORE_H */
