#ifndef SYNQC_H
#define SYNQC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SynqcForm {
  SYNQC_FORM_BIGRAPH = 0,
  SYNQC_FORM_GRAMMAR_MEANING = 1,
  SYNQC_FORM_CHOI = 2,
} SynqcForm;

typedef enum SynqcRewrite {
  SYNQC_REWRITE_SNAKE = 0,
  SYNQC_REWRITE_NONE = 1,
} SynqcRewrite;

typedef enum SynqcStatus {
  SYNQC_STATUS_OK = 0,
  SYNQC_STATUS_NULL_POINTER = 1,
  SYNQC_STATUS_INVALID_UTF8 = 2,
  SYNQC_STATUS_INVALID_INPUT = 3,
  SYNQC_STATUS_UNKNOWN_WORD = 4,
  SYNQC_STATUS_UNGRAMMATICAL = 5,
  SYNQC_STATUS_JSON = 6,
  SYNQC_STATUS_COMPILE = 7,
  SYNQC_STATUS_UNRESOLVED_PARAMETER = 8,
  SYNQC_STATUS_SIMULATION = 9,
  SYNQC_STATUS_BUFFER_TOO_SMALL = 10,
  SYNQC_STATUS_IO = 11,
  SYNQC_STATUS_PANIC = 12,
} SynqcStatus;

typedef struct SynqcCircuit SynqcCircuit;

typedef struct SynqcLexicon SynqcLexicon;

typedef struct SynqcParams SynqcParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *synqc_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void synqc_string_free(char *s);

/**
 * # Safety
 * `out` is valid for writes.
 */
enum SynqcStatus synqc_lexicon_default(struct SynqcLexicon **out);

/**
 * # Safety
 * `json` is a NUL-terminated string and `out` is valid for writes.
 */
enum SynqcStatus synqc_lexicon_from_json(const char *json, struct SynqcLexicon **out);

/**
 * # Safety
 * `lex` is null or a handle from this library not yet freed.
 */
void synqc_lexicon_free(struct SynqcLexicon *lex);

/**
 * Parses `sentence`. `grammatical` receives whether it reduces to the
 * sentence type; `report` (may be null) receives the parse as JSON.
 *
 * # Safety
 * Handles are live, `sentence` is NUL-terminated, outputs are valid for writes.
 */
enum SynqcStatus synqc_parse(const struct SynqcLexicon *lex,
                             const char *sentence,
                             bool *grammatical,
                             char **report);

/**
 * Compiles `sentence` with the lexicon's qubit configuration.
 *
 * # Safety
 * Handles are live, `sentence` is NUL-terminated, `out` is valid for writes.
 */
enum SynqcStatus synqc_compile(const struct SynqcLexicon *lex,
                               const char *sentence,
                               enum SynqcForm form,
                               enum SynqcRewrite rewrite,
                               struct SynqcCircuit **out);

/**
 * # Safety
 * `json` is NUL-terminated and `out` is valid for writes.
 */
enum SynqcStatus synqc_circuit_from_json(const char *json, struct SynqcCircuit **out);

/**
 * # Safety
 * `c` is live and `out` is valid for writes.
 */
enum SynqcStatus synqc_circuit_to_json(const struct SynqcCircuit *c, char **out);

/**
 * OpenQASM 2 text with angles bound from `params`, which may be null when
 * every angle is a literal.
 *
 * # Safety
 * Handles are null or live and `out` is valid for writes.
 */
enum SynqcStatus synqc_circuit_to_qasm(const struct SynqcCircuit *c,
                                       const struct SynqcParams *params,
                                       char **out);

/**
 * # Safety
 * `c` is null or a handle from this library not yet freed.
 */
void synqc_circuit_free(struct SynqcCircuit *c);

/**
 * Number of qubits, or 0 for a null handle.
 *
 * # Safety
 * `c` is null or live.
 */
size_t synqc_circuit_n_qubits(const struct SynqcCircuit *c);

/**
 * Number of open qubits, or 0 for a null handle.
 *
 * # Safety
 * `c` is null or live.
 */
size_t synqc_circuit_n_open(const struct SynqcCircuit *c);

/**
 * Number of distinct parameter names, or 0 for a null handle.
 *
 * # Safety
 * `c` is null or live.
 */
size_t synqc_circuit_n_params(const struct SynqcCircuit *c);

/**
 * # Safety
 * `out` is valid for writes.
 */
enum SynqcStatus synqc_params_new(struct SynqcParams **out);

/**
 * Uniform angles for every parameter of `c`, drawn from `seed`.
 *
 * # Safety
 * `c` is live and `out` is valid for writes.
 */
enum SynqcStatus synqc_params_random(const struct SynqcCircuit *c,
                                     uint64_t seed,
                                     struct SynqcParams **out);

/**
 * Draws angles for the parameters of `c` that `p` lacks.
 *
 * # Safety
 * Handles are live.
 */
enum SynqcStatus synqc_params_fill_missing(struct SynqcParams *p,
                                           const struct SynqcCircuit *c,
                                           uint64_t seed);

/**
 * # Safety
 * `json` is NUL-terminated and `out` is valid for writes.
 */
enum SynqcStatus synqc_params_from_json(const char *json, struct SynqcParams **out);

/**
 * # Safety
 * `p` is live and `out` is valid for writes.
 */
enum SynqcStatus synqc_params_to_json(const struct SynqcParams *p, char **out);

/**
 * # Safety
 * `p` is live and `name` is NUL-terminated.
 */
enum SynqcStatus synqc_params_set(struct SynqcParams *p, const char *name, double value);

/**
 * # Safety
 * `p` is live, `name` is NUL-terminated and `value` is valid for writes.
 */
enum SynqcStatus synqc_params_get(const struct SynqcParams *p, const char *name, double *value);

/**
 * # Safety
 * `p` is null or a handle from this library not yet freed.
 */
void synqc_params_free(struct SynqcParams *p);

/**
 * Simulates `c` and writes the `2^open` amplitudes, scalar applied, into
 * `re` and `im`. `len` always receives the amplitude count; when `capacity`
 * is smaller nothing is written and `BufferTooSmall` is returned, so a call
 * with null buffers and zero capacity queries the size.
 *
 * # Safety
 * Handles are live, `re` and `im` hold `capacity` doubles, `len` is valid
 * for writes.
 */
enum SynqcStatus synqc_simulate(const struct SynqcCircuit *c,
                                const struct SynqcParams *p,
                                double *re,
                                double *im,
                                size_t capacity,
                                size_t *len);

/**
 * Fidelity of the meanings of `a` and `b` under the same parameters.
 *
 * # Safety
 * Handles are live and `out` is valid for writes.
 */
enum SynqcStatus synqc_fidelity(const struct SynqcCircuit *a,
                                const struct SynqcCircuit *b,
                                const struct SynqcParams *p,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYNQC_H */
