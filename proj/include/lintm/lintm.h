/* lintm - semi-supervised neural topic modeling.
 *
 * C API over the core library. All functions returning int use the codes
 * below; on any nonzero return the output arguments are untouched and
 * lintm_last_error() describes the failure (thread-local).
 *
 * Strings returned through char** outputs are heap-allocated; release
 * them with lintm_string_free().
 */
#ifndef LINTM_H
#define LINTM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define LINTM_OK 0
#define LINTM_ERR_CONFIG 2  /* bad configuration or argument */
#define LINTM_ERR_DATA 3    /* unreadable or malformed data */
#define LINTM_ERR_NUMERIC 4 /* non-finite loss or invalid distribution */

typedef struct lintm_corpus lintm_corpus;
typedef struct lintm_model lintm_model;

const char* lintm_version(void);

/* Message for the most recent failure on this thread; empty string when
 * nothing failed yet. The pointer stays valid until the next API call. */
const char* lintm_last_error(void);

void lintm_string_free(char* s);

/* ---- corpus ---- */

int lintm_corpus_load(const char* path, lintm_corpus** out);
int lintm_corpus_save(const lintm_corpus* corpus, const char* path);

/* CSV rows are (class 1..4, title, description). Malformed rows and
 * documents left empty after vocabulary filtering are skipped;
 * *stats_json (optional) reports counts and per-line errors. */
int lintm_corpus_from_agnews(const char* csv_path, size_t min_count,
                             size_t max_vocab, lintm_corpus** out,
                             char** stats_json);

/* Disjoint labeled/unlabeled/test subsets from one seeded shuffle.
 * Unlabeled documents keep their label only as a hidden evaluation
 * field. Any output pointer may be NULL to skip that subset. */
int lintm_corpus_split(const lintm_corpus* corpus, double labeled_frac,
                       double unlabeled_frac, double test_frac, uint64_t seed,
                       lintm_corpus** labeled, lintm_corpus** unlabeled,
                       lintm_corpus** test);

/* JSON: num_docs, vocab_size, num_labels, labeled_docs, total_tokens. */
int lintm_corpus_stats(const lintm_corpus* corpus, char** stats_json);

void lintm_corpus_free(lintm_corpus* corpus);

/* ---- synthetic lab ---- */

/* One synthetic trial: draws a pair of half-concentrated word
 * distributions, then emits the same documents twice, once with ideal
 * labels (the generating distribution) and once with worst-case labels
 * (document-length parity). *lower_bound (optional) receives the
 * empirical per-token perplexity bound of the generator. */
int lintm_synth_generate(size_t vocab_size, size_t num_docs, uint64_t seed,
                         lintm_corpus** ideal, lintm_corpus** worst,
                         double* lower_bound);

/* ---- training ---- */

/* config_json selects the family through its "model" key: "lintm"
 * (default), "ntm", "etm", or "clf". Remaining keys override training
 * defaults; unknown keys are rejected. `unlabeled` may be NULL. For
 * "etm" and "ntm" labels are ignored and both pools are merged; "clf"
 * uses only the labeled pool. */
int lintm_train(const char* config_json, const lintm_corpus* labeled,
                const lintm_corpus* unlabeled, lintm_model** out);

int lintm_model_save(const lintm_model* model, const char* path);
int lintm_model_load(const char* path, lintm_model** out);
void lintm_model_free(lintm_model* model);

/* Per-epoch mean training loss. The pointer aliases the model and is
 * valid until the model is freed. */
int lintm_model_loss_trace(const lintm_model* model, const double** data,
                           size_t* len);

/* ---- evaluation ---- */

/* Metrics against a held-out corpus as JSON: perplexity and per-topic
 * top words where the model has a decoder, accuracy where it has a
 * classifier. Deterministic; test labels feed only the accuracy count. */
int lintm_eval(const lintm_model* model, const lintm_corpus* test,
               char** report_json);

/* Top-`top_n` words of every (label, topic) pair, rendered as aligned
 * text or CSV. The corpus supplies the vocabulary. */
int lintm_topics_text(const lintm_model* model, const lintm_corpus* corpus,
                      size_t top_n, char** text);
int lintm_topics_csv(const lintm_model* model, const lintm_corpus* corpus,
                     size_t top_n, char** csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LINTM_H */
