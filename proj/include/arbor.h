/* arbor — graph-based dependency parsing toolkit.
 *
 * C API of the shared library. All functions that can fail return an
 * arbor_status; ARBOR_OK is zero. On failure arbor_last_error() holds a
 * thread-local description of what went wrong. Objects are opaque handles
 * released with the matching *_free function; strings returned through
 * char** out-parameters are released with arbor_string_free().
 */

#ifndef ARBOR_H
#define ARBOR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arbor_status {
  ARBOR_OK = 0,
  ARBOR_ERROR_IO = 1,        /* file cannot be opened, read, or written */
  ARBOR_ERROR_MALFORMED = 2, /* malformed CoNLL-U, rule table, or container */
  ARBOR_ERROR_CONFIG = 3,    /* unknown config key or wrong value type */
  ARBOR_ERROR_DATA = 4,      /* invalid tree, vocabulary or alignment mismatch */
  ARBOR_ERROR_LIMIT = 5,     /* a size limit was exceeded */
  ARBOR_ERROR_ARGUMENT = 6,  /* null handle or argument outside a precondition */
  ARBOR_ERROR_INTERNAL = 7
} arbor_status;

typedef struct arbor_treebank arbor_treebank;
typedef struct arbor_config arbor_config; /* model config + training schedule */
typedef struct arbor_model arbor_model;
typedef struct arbor_metrics arbor_metrics;

const char* arbor_version(void);
const char* arbor_last_error(void);
void arbor_string_free(char* s);

/* ------------------------------------------------------------------ */
/* CoNLL-U treebanks                                                   */

arbor_status arbor_treebank_parse(const char* text, const char* name, arbor_treebank** out);
arbor_status arbor_treebank_read(const char* path, const char* name_or_null,
                                 arbor_treebank** out);
arbor_status arbor_treebank_write(const arbor_treebank* tb, const char* path);
arbor_status arbor_treebank_serialize(const arbor_treebank* tb, char** out);
size_t arbor_treebank_sentence_count(const arbor_treebank* tb);
size_t arbor_treebank_token_count(const arbor_treebank* tb);
const char* arbor_treebank_name(const arbor_treebank* tb);
/* ARBOR_OK when every sentence is a single-rooted tree. */
arbor_status arbor_treebank_validate_trees(const arbor_treebank* tb);
void arbor_treebank_free(arbor_treebank* tb);

/* ------------------------------------------------------------------ */
/* Configuration (strict JSON; omitted keys take the built-in defaults) */

arbor_status arbor_config_default(arbor_config** out);
arbor_status arbor_config_read(const char* path, arbor_config** out);
arbor_status arbor_config_parse(const char* json_text, arbor_config** out);
void arbor_config_free(arbor_config* config);

/* ------------------------------------------------------------------ */
/* Training, model files, prediction                                   */

arbor_status arbor_train(const arbor_config* config, const arbor_treebank* const* treebanks,
                         size_t n_treebanks, int verbose, arbor_model** out);
arbor_status arbor_model_read(const char* path, arbor_model** out);
arbor_status arbor_model_write(const arbor_model* model, const char* path);
int arbor_model_uses_gold_upos(const arbor_model* model);
void arbor_model_free(arbor_model* model);

/* Annotates a copy of the input treebank. Several models form a
 * probability-averaging ensemble. add_dummy_punct appends a temporary
 * sentence-final period before decoding and removes it afterwards.
 * threads caps worker parallelism (1 = sequential). */
arbor_status arbor_parse(const arbor_model* const* models, size_t n_models,
                         const arbor_treebank* input, int add_dummy_punct, int threads,
                         arbor_treebank** out);

/* ------------------------------------------------------------------ */
/* Harmonization                                                       */

arbor_status arbor_harmonize(const arbor_treebank* input, int fixed_to_flat, int relabel_dep,
                             const char* rules_path_or_null, arbor_treebank** out);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

arbor_status arbor_evaluate(const arbor_treebank* const* gold,
                            const arbor_treebank* const* system, size_t n_treebanks,
                            int strip_subtypes, arbor_metrics** out);
arbor_status arbor_metrics_text(const arbor_metrics* metrics, char** out);
arbor_status arbor_metrics_json(const arbor_metrics* metrics, char** out);
/* metric is one of "uas", "las", "upos", "ufeats"; treebank_index in
 * 0..n_treebanks-1, or ARBOR_METRICS_MACRO for the macro average. */
#define ARBOR_METRICS_MACRO ((size_t)-1)
arbor_status arbor_metrics_value(const arbor_metrics* metrics, size_t treebank_index,
                                 const char* metric, double* out);
void arbor_metrics_free(arbor_metrics* metrics);

/* ------------------------------------------------------------------ */
/* Multi-treebank sampling report                                      */

arbor_status arbor_sample_report(const arbor_treebank* const* treebanks, size_t n_treebanks,
                                 char** out);

#ifdef __cplusplus
}
#endif

#endif /* ARBOR_H */
