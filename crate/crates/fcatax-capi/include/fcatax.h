#ifndef FCATAX_H
#define FCATAX_H

/* This file is generated by cbindgen from fcatax-capi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call in this ABI.
 */
typedef enum FcaStatus {
  /*
   The call succeeded.
   */
  FcaOk = 0,
  /*
   A pointer was null, an index out of range, or text not UTF-8.
   */
  FcaInvalidArgument = 1,
  /*
   The input could not be parsed.
   */
  FcaParseError = 2,
  /*
   The operation produced an empty result.
   */
  FcaEmptyResult = 3,
  /*
   The concept limit was exceeded.
   */
  FcaCapacityExceeded = 4,
  /*
   An internal consistency check failed.
   */
  FcaInconsistent = 5,
  /*
   An underlying I/O operation failed.
   */
  FcaIoError = 6,
  /*
   The library panicked; the handle states are unspecified.
   */
  FcaPanic = 7,
} FcaStatus;

/*
 A formal context (objects, attributes, incidence).
 */
typedef struct FcaContext FcaContext;

/*
 A fully enumerated concept lattice with its cover graph.
 */
typedef struct FcaLattice FcaLattice;

/*
 A selected sub-family of concepts with its induced order.
 */
typedef struct FcaSelection FcaSelection;

/*
 Stability indices for every concept of a lattice.
 */
typedef struct FcaStability FcaStability;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Returns the message of the most recent failure on this thread, or
 an empty string. The pointer stays valid until the next failing
 call on the same thread.
 */
const char *fca_last_error_message(void);

/*
 Releases a string returned by this library. Null is a no-op.

 # Safety
 `s` must have been returned by an fcatax call and not yet freed.
 */
void fca_string_free(char *s);

/*
 Parses a context from CXT-format text.

 # Safety
 `text` must be a NUL-terminated string; `out` must be a valid
 pointer.
 */
enum FcaStatus fca_context_parse_cxt(const char *text, struct FcaContext **out);

/*
 Reads a context from a CXT file on disk.

 # Safety
 `path` must be a NUL-terminated string; `out` must be a valid
 pointer.
 */
enum FcaStatus fca_context_read_cxt_file(const char *path, struct FcaContext **out);

/*
 Number of objects in the context; 0 if `ctx` is null.

 # Safety
 `ctx` must be a live context handle or null.
 */
size_t fca_context_object_count(const struct FcaContext *ctx);

/*
 Number of attributes in the context; 0 if `ctx` is null.

 # Safety
 `ctx` must be a live context handle or null.
 */
size_t fca_context_attribute_count(const struct FcaContext *ctx);

/*
 Releases a context handle. Null is a no-op.

 # Safety
 `ctx` must be a live context handle or null; it must not be used
 afterwards.
 */
void fca_context_free(struct FcaContext *ctx);

/*
 Enumerates all concepts and the cover graph. `max_concepts` of 0
 means the default limit.

 # Safety
 `ctx` must be a live context handle; `out` must be a valid pointer.
 */
enum FcaStatus fca_lattice_build(const struct FcaContext *ctx,
                                 size_t max_concepts,
                                 struct FcaLattice **out);

/*
 Number of concepts in the lattice; 0 if `lat` is null.

 # Safety
 `lat` must be a live lattice handle or null.
 */
size_t fca_lattice_concept_count(const struct FcaLattice *lat);

/*
 Number of cover edges in the lattice; 0 if `lat` is null.

 # Safety
 `lat` must be a live lattice handle or null.
 */
size_t fca_lattice_edge_count(const struct FcaLattice *lat);

/*
 Serializes the lattice as JSON with named extents and intents.

 # Safety
 `ctx` and `lat` must be live handles built from each other; `out`
 must be a valid pointer.
 */
enum FcaStatus fca_lattice_to_json(const struct FcaContext *ctx,
                                   const struct FcaLattice *lat,
                                   char **out);

/*
 Releases a lattice handle. Null is a no-op.

 # Safety
 `lat` must be a live lattice handle or null; it must not be used
 afterwards.
 */
void fca_lattice_free(struct FcaLattice *lat);

/*
 Computes the stability index of every concept.

 # Safety
 `ctx` and `lat` must be live handles built from each other; `out`
 must be a valid pointer.
 */
enum FcaStatus fca_stability_compute(const struct FcaContext *ctx,
                                     const struct FcaLattice *lat,
                                     struct FcaStability **out);

/*
 Fetches the stability index of one concept.

 # Safety
 `stab` must be a live stability handle; `sigma` must be a valid
 pointer.
 */
enum FcaStatus fca_stability_sigma(const struct FcaStability *stab,
                                   size_t concept_id,
                                   double *sigma);

/*
 Fetches one concept's exact generator count as a decimal string.

 # Safety
 `stab` must be a live stability handle; `out` must be a valid
 pointer.
 */
enum FcaStatus fca_stability_generator_count(const struct FcaStability *stab,
                                             size_t concept_id,
                                             char **out);

/*
 Serializes the whole stability report as JSON.

 # Safety
 `stab` must be a live stability handle; `out` must be a valid
 pointer.
 */
enum FcaStatus fca_stability_to_json(const struct FcaStability *stab, char **out);

/*
 Releases a stability handle. Null is a no-op.

 # Safety
 `stab` must be a live stability handle or null; it must not be
 used afterwards.
 */
void fca_stability_free(struct FcaStability *stab);

/*
 Selects every concept whose extent has at least `min_extent`
 objects.

 # Safety
 `lat` must be a live lattice handle; `out` must be a valid pointer.
 */
enum FcaStatus fca_select_iceberg(const struct FcaLattice *lat,
                                  size_t min_extent,
                                  struct FcaSelection **out);

/*
 Selects the `k` concepts of largest extent.

 # Safety
 `lat` must be a live lattice handle; `out` must be a valid pointer.
 */
enum FcaStatus fca_select_top_extent(const struct FcaLattice *lat,
                                     size_t k,
                                     struct FcaSelection **out);

/*
 Selects the `k` most stable concepts, optionally dropping the
 degenerate extremes first.

 # Safety
 `lat` and `stab` must be live handles built from the same context;
 `out` must be a valid pointer.
 */
enum FcaStatus fca_select_top_stability(const struct FcaLattice *lat,
                                        const struct FcaStability *stab,
                                        size_t k,
                                        bool exclude_extremes,
                                        struct FcaSelection **out);

/*
 Selects every concept with stability strictly above `theta`.

 # Safety
 `lat` and `stab` must be live handles built from the same context;
 `out` must be a valid pointer.
 */
enum FcaStatus fca_select_stability_gt(const struct FcaLattice *lat,
                                       const struct FcaStability *stab,
                                       double theta,
                                       struct FcaSelection **out);

/*
 Number of selected concepts; 0 if `sel` is null.

 # Safety
 `sel` must be a live selection handle or null.
 */
size_t fca_selection_len(const struct FcaSelection *sel);

/*
 Fetches the concept id at `index` in selection order.

 # Safety
 `sel` must be a live selection handle; `concept_id` must be a
 valid pointer.
 */
enum FcaStatus fca_selection_id_at(const struct FcaSelection *sel,
                                   size_t index,
                                   size_t *concept_id);

/*
 Serializes a selection as JSON.

 # Safety
 `ctx`, `lat`, and `sel` must be live handles derived from each
 other; `out` must be a valid pointer.
 */
enum FcaStatus fca_selection_to_json(const struct FcaContext *ctx,
                                     const struct FcaLattice *lat,
                                     const struct FcaSelection *sel,
                                     char **out);

/*
 Renders a selection as a Graphviz DOT diagram with stability
 labels.

 # Safety
 `ctx`, `lat`, `sel`, and `stab` must be live handles derived from
 each other; `out` must be a valid pointer.
 */
enum FcaStatus fca_selection_to_dot(const struct FcaContext *ctx,
                                    const struct FcaLattice *lat,
                                    const struct FcaSelection *sel,
                                    const struct FcaStability *stab,
                                    char **out);

/*
 Releases a selection handle. Null is a no-op.

 # Safety
 `sel` must be a live selection handle or null; it must not be used
 afterwards.
 */
void fca_selection_free(struct FcaSelection *sel);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FCATAX_H */
