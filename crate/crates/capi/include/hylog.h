/* C interface to the hylog hybrid knowledge base library. */

#ifndef HYLOG_H
#define HYLOG_H

/* Generated from the Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How a call ended. The numeric values match the command line tool's
 * exit codes.
 */
typedef enum HylogStatus {
  /**
   * The call completed; any verdict is in the out parameters.
   */
  HYLOG_STATUS_OK = 0,
  /**
   * A pointer was null, text was not valid UTF-8, or the input did
   * not parse or validate.
   */
  HYLOG_STATUS_INVALID_INPUT = 2,
  /**
   * A reasoning bound was exhausted; raise the limits and retry.
   */
  HYLOG_STATUS_RESOURCE_LIMIT = 3,
  /**
   * The background knowledge base is unsatisfiable, so induction
   * over it would be vacuous.
   */
  HYLOG_STATUS_INCONSISTENT_INPUT = 4,
} HylogStatus;

/**
 * An opaque parsed and validated knowledge base. Create with
 * [`hylog_kb_parse`], release with [`hylog_kb_free`].
 */
typedef struct HylogKb HylogKb;

/**
 * Reasoning bounds. Obtain a baseline from [`hylog_default_limits`]
 * and adjust fields as needed; passing null wherever a limits pointer
 * is expected uses the defaults.
 */
typedef struct HylogLimits {
  /**
   * Partitions tested per satisfiability question before giving up.
   */
  uint64_t max_partitions;
  /**
   * Ceiling on distinct ground datalog atoms.
   */
  uint64_t max_herbrand;
  /**
   * Search nodes per stable-model question.
   */
  uint64_t datalog_budget;
} HylogLimits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The default reasoning bounds.
 */
struct HylogLimits hylog_default_limits(void);

/**
 * The message from the last failed call on this thread, or null if the
 * last call succeeded.
 *
 * # Safety
 *
 * The returned pointer stays valid only until this thread next calls
 * any function in this library; copy the message out before that.
 */
const char *hylog_last_error(void);

/**
 * Parse and validate a knowledge base from its surface syntax and
 * store a handle in `*out`.
 *
 * # Safety
 *
 * `text` must point to a NUL-terminated string and `out` to writable
 * storage for one pointer. On success the caller owns the handle and
 * must release it with [`hylog_kb_free`]; on failure `*out` is not
 * written.
 */
enum HylogStatus hylog_kb_parse(const char *text, struct HylogKb **out);

/**
 * Release a knowledge base handle. Passing null is a no-op.
 *
 * # Safety
 *
 * `kb` must be a handle from [`hylog_kb_parse`] that has not already
 * been freed.
 */
void hylog_kb_free(struct HylogKb *kb);

/**
 * Decide whether the knowledge base has a model and write the verdict
 * to `*out_satisfiable`.
 *
 * # Safety
 *
 * `kb` must be a live handle from [`hylog_kb_parse`], `limits` null or
 * a valid pointer, and `out_satisfiable` writable. On failure
 * `*out_satisfiable` is not written.
 */
enum HylogStatus hylog_check_sat(const struct HylogKb *kb,
                                 const struct HylogLimits *limits,
                                 bool *out_satisfiable);

/**
 * Decide whether the knowledge base entails a ground conjunction such
 * as `"boy(paul), MALE(paul)"` and write the verdict to
 * `*out_entailed`.
 *
 * # Safety
 *
 * `kb` must be a live handle, `query` a NUL-terminated string,
 * `limits` null or valid, and `out_entailed` writable. On failure
 * `*out_entailed` is not written.
 */
enum HylogStatus hylog_query(const struct HylogKb *kb,
                             const char *query,
                             const struct HylogLimits *limits,
                             bool *out_entailed);

/**
 * Induce a view over the target predicate from labeled examples and
 * write the accepted rules, one per line in surface syntax, to
 * `*out_theory`.
 *
 * # Safety
 *
 * `kb` must be a live handle; `bias` and `examples` NUL-terminated
 * strings in the language and example file syntaxes; `limits` null or
 * valid; `out_theory` writable. On success the caller owns the string
 * and must release it with [`hylog_string_free`]; on failure
 * `*out_theory` is not written.
 */
enum HylogStatus hylog_learn_view(const struct HylogKb *kb,
                                  const char *bias,
                                  const char *examples,
                                  const struct HylogLimits *limits,
                                  char **out_theory);

/**
 * Discover constraints and rules that hold on the knowledge base and
 * write them, one per line in surface syntax, to `*out_theory`. When
 * `minimize` is true, rules the rest of the theory entails are dropped
 * first; that takes an unsatisfiability proof per candidate, so bound
 * it through `limits` on large theories.
 *
 * # Safety
 *
 * Same contract as [`hylog_learn_view`], minus the examples.
 */
enum HylogStatus hylog_discover(const struct HylogKb *kb,
                                const char *bias,
                                const struct HylogLimits *limits,
                                bool minimize,
                                char **out_theory);

/**
 * Release a string returned by this library. Passing null is a no-op.
 *
 * # Safety
 *
 * `s` must be a string this library returned that has not already been
 * freed.
 */
void hylog_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYLOG_H */
