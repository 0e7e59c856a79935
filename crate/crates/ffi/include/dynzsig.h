#ifndef DYNZSIG_H
#define DYNZSIG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DZ_STATUS_OK = 0,
  DZ_STATUS_NULL_POINTER = 1,
  DZ_STATUS_INVALID_UTF8 = 2,
  DZ_STATUS_PARSE_ERROR = 3,
  DZ_STATUS_INVALID_INPUT = 4,
  DZ_STATUS_RESOURCE_CAP = 5,
  DZ_STATUS_INVARIANT = 6,
  DZ_STATUS_PANIC = 7,
} DzStatus;

/**
 * Opaque handle to a rational map over Q.
 */
typedef struct DzMap DzMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a map expression in `x` into a new handle stored in `*out`.
 *
 * # Safety
 * `expr` must be a NUL-terminated string and `out` a valid pointer.
 */
DzStatus dz_map_parse(const char *expr, DzMap **out);

/**
 * Releases a handle from `dz_map_parse`. Null is ignored.
 *
 * # Safety
 * `map` must be null or a handle not yet freed.
 */
void dz_map_free(DzMap *map);

/**
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
DzStatus dz_map_degree(const DzMap *map, uint32_t *out);

/**
 * Canonical text of the map.
 *
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
DzStatus dz_map_render(const DzMap *map, char **out);

/**
 * `φ(z)` for `z` given as `p`, `p/q` or `inf`.
 *
 * # Safety
 * `map` must be a live handle, `z` a NUL-terminated string, `out` valid.
 */
DzStatus dz_map_evaluate(const DzMap *map, const char *z, char **out);

/**
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
DzStatus dz_map_is_power_map(const DzMap *map, bool *out);

/**
 * Canonical height of `alpha` with `|estimate - ĥ| ≤ radius`.
 *
 * # Safety
 * `map` must be a live handle, `alpha` a NUL-terminated string, and both
 * output pointers valid.
 */
DzStatus dz_canonical_height(const DzMap *map,
                             const char *alpha,
                             double tol,
                             double *estimate,
                             double *radius);

/**
 * Zsigmondy report for the orbit of `alpha` up to level `max_n`, as JSON.
 *
 * # Safety
 * `map` must be a live handle, `alpha` a NUL-terminated string, `out` valid.
 */
DzStatus dz_zsigmondy_json(const DzMap *map, const char *alpha, uint32_t max_n, char **out);

/**
 * Tower certificates for `x^2 + a` at levels `0..=max_n`, as JSON.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
DzStatus dz_galois_tower_json(int64_t a, uint32_t max_n, char **out);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *dz_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void dz_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *dz_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNZSIG_H */
