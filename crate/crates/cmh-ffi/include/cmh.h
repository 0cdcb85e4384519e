/* C interface to the cmh verification library. */

#ifndef CMH_H
#define CMH_H

/* Generated by cbindgen from the cmh-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * The call completed; any identity failures are inside the report.
 */
#define CMH_OK 0

/**
 * A required pointer was NULL.
 */
#define CMH_ERR_NULL 1

/**
 * An argument failed validation (precision, tolerance, JSON, UTF-8, ...).
 */
#define CMH_ERR_ARGUMENT 2

/**
 * The computation itself reported an error.
 */
#define CMH_ERR_COMPUTE 3

/**
 * A panic was caught at the boundary; the handle remains usable.
 */
#define CMH_ERR_PANIC 4

/**
 * Opaque evaluation context: working precision plus report tolerance.
 */
typedef struct CmhContext CmhContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a context with the given working precision in decimal digits
 * (minimum 30) and the default tolerance `1e-9`.  Returns NULL on
 * failure; see `cmh_last_error_message`.
 */
struct CmhContext *cmh_context_new(uint32_t precision_digits);

/**
 * Release a context.  NULL is ignored.
 *
 * # Safety
 * `ctx` must be NULL or a pointer returned by `cmh_context_new` that has
 * not been freed already.
 */
void cmh_context_free(struct CmhContext *ctx);

/**
 * Replace the pass/fail tolerance (a decimal string such as "1e-12").
 *
 * # Safety
 * `ctx` must be a live context pointer; `tolerance` a NUL-terminated
 * UTF-8 string.
 */
int cmh_context_set_tolerance(struct CmhContext *ctx, const char *tolerance);

/**
 * Verify the Chowla-Selberg identities (three shapes plus the Faltings
 * cross-check) for one fundamental discriminant; writes the JSON record
 * stream to `*out_json`.
 *
 * # Safety
 * `ctx` must be a live context pointer and `out_json` a valid location
 * to store a string pointer.
 */
int cmh_chowla_selberg_json(const struct CmhContext *ctx, int64_t discriminant, char **out_json);

/**
 * Verify the averaged Colmez identity and its corollaries for the
 * abelian CM field cut out of the `modulus`-th cyclotomic field by the
 * subgroup generated by `subgroup[0..subgroup_len]`; writes the JSON
 * record stream to `*out_json`.
 *
 * # Safety
 * `ctx` and `out_json` as above; `subgroup` must point to
 * `subgroup_len` readable values (it may be NULL when the length is 0).
 */
int cmh_averaged_colmez_json(const struct CmhContext *ctx,
                             uint64_t modulus,
                             const uint64_t *subgroup,
                             size_t subgroup_len,
                             char **out_json);

/**
 * Enumerate the CM types of the same field datum as a JSON object
 * (modulus, degree, types with members and reflex data).
 *
 * # Safety
 * Pointer contracts as for `cmh_averaged_colmez_json`.
 */
int cmh_cm_types_json(uint64_t modulus,
                      const uint64_t *subgroup,
                      size_t subgroup_len,
                      char **out_json);

/**
 * The Faltings height of a CM elliptic curve with CM by the maximal
 * order of discriminant `discriminant`, as a double.
 *
 * # Safety
 * `ctx` must be a live context pointer and `out_value` writable.
 */
int cmh_cm_elliptic_faltings(const struct CmhContext *ctx, int64_t discriminant, double *out_value);

/**
 * Check the Weil representation relations for the even Gram matrix given
 * as a JSON array of arrays (e.g. "[[2,1],[1,2]]"); optionally validate
 * form coefficients given as the JSON object accepted by the CLI
 * (`{"weight": "p/q", "entries": [{"m": ..., "mu": [...], "c": ...}]}`;
 * pass NULL to skip).  Writes the JSON record stream to `*out_json`.
 *
 * # Safety
 * `ctx` and `out_json` as above; `gram_json` must be a NUL-terminated
 * UTF-8 string, and `form_json` NULL or likewise.
 */
int cmh_weilrep_check_json(const struct CmhContext *ctx,
                           const char *gram_json,
                           const char *form_json,
                           char **out_json);

/**
 * Free a string returned through an out-pointer.  NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer produced by this library that has not
 * been freed already.
 */
void cmh_string_free(char *s);

/**
 * Description of the most recent failure on the calling thread, or an
 * empty string.  The pointer is owned by the library and valid until the
 * next failing call on the same thread; do not free it.
 */
const char *cmh_last_error_message(void);

/**
 * The library version as a static string; do not free it.
 */
const char *cmh_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMH_H */
