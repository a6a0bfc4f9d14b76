// Copyright 2026 The xsum-forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the xsum-forge toolkit.
 *
 * Every function returns an xsf_status. On failure the message for the
 * calling thread is available from xsf_last_error_message() until the next
 * call into the library. Handles are opaque and owned by the caller; release
 * them with the matching *_destroy function (NULL is accepted).
 *
 * String results use a caller buffer: pass `buf`/`cap`, and `needed` receives
 * the full length including the terminating NUL. A too-small buffer yields
 * XSF_ERR_INVALID_ARGUMENT with `needed` set, so callers may query with
 * cap == 0 first. */
#ifndef XSUM_FORGE_XSUM_FORGE_H_
#define XSUM_FORGE_XSUM_FORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(XSF_BUILDING_LIBRARY)
#    define XSF_API __declspec(dllexport)
#  else
#    define XSF_API __declspec(dllimport)
#  endif
#else
#  define XSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xsf_status {
  XSF_OK = 0,
  XSF_ERR_INVALID_ARGUMENT = 1,
  XSF_ERR_IO = 2,
  XSF_ERR_NOT_FOUND = 3,
  XSF_ERR_PARSE = 4,
  XSF_ERR_FORMAT = 5,
  XSF_ERR_DIMENSION = 6,
  XSF_ERR_NORM = 7,
  XSF_ERR_DUPLICATE_ID = 8,
  XSF_ERR_UNKNOWN_ID = 9,
  XSF_ERR_EMPTY = 10,
  XSF_ERR_CONSISTENCY = 11,
  XSF_ERR_CONFIG = 12,
  XSF_ERR_INTERNAL = 13
} xsf_status;

typedef enum xsf_rouge_variant {
  XSF_ROUGE_1 = 1,
  XSF_ROUGE_2 = 2,
  XSF_ROUGE_L = 3
} xsf_rouge_variant;

typedef struct xsf_config xsf_config;
typedef struct xsf_corpus xsf_corpus;
typedef struct xsf_store xsf_store;
typedef struct xsf_pairs xsf_pairs;
typedef struct xsf_langid xsf_langid;

typedef void (*xsf_log_fn)(const char* line, void* user);

XSF_API const char* xsf_version(void);
XSF_API const char* xsf_status_string(xsf_status status);
XSF_API const char* xsf_last_error_message(void);
/* Receives progress lines from stages. Pass NULL to silence. */
XSF_API void xsf_set_log_callback(xsf_log_fn fn, void* user);

/* Config */
XSF_API xsf_status xsf_config_create(xsf_config** out);
XSF_API void xsf_config_destroy(xsf_config* cfg);
XSF_API xsf_status xsf_config_set(xsf_config* cfg, const char* key, const char* value);
XSF_API xsf_status xsf_config_get(const xsf_config* cfg, const char* key, char* buf, size_t cap,
                                  size_t* needed);
XSF_API xsf_status xsf_config_load_file(xsf_config* cfg, const char* path);
XSF_API xsf_status xsf_config_validate(const xsf_config* cfg);
XSF_API xsf_status xsf_config_render(const xsf_config* cfg, char* buf, size_t cap, size_t* needed);
/* Number of known keys and the i-th key name (static storage). */
XSF_API size_t xsf_config_key_count(void);
XSF_API const char* xsf_config_key(size_t i);

/* Corpus */
XSF_API xsf_status xsf_corpus_load(const char* path, xsf_corpus** out);
XSF_API void xsf_corpus_destroy(xsf_corpus* corpus);
XSF_API xsf_status xsf_corpus_size(const xsf_corpus* corpus, size_t* out);

/* Embedding store */
XSF_API xsf_status xsf_store_import(const xsf_corpus* corpus, const char* vectors_path, xsf_store** out);
XSF_API void xsf_store_destroy(xsf_store* store);
XSF_API xsf_status xsf_store_size(const xsf_store* store, size_t* out);
XSF_API xsf_status xsf_store_dimension(const xsf_store* store, uint32_t* out);
/* Writes the normalized vectors; `manifest_path` may be NULL. */
XSF_API xsf_status xsf_store_write(const xsf_store* store, const xsf_corpus* corpus,
                                   const char* vectors_path, const char* manifest_path);

/* Pair sets */
XSF_API xsf_status xsf_pairs_load(const char* path, xsf_pairs** out);
XSF_API xsf_status xsf_pairs_create_empty(xsf_pairs** out);
XSF_API void xsf_pairs_destroy(xsf_pairs* pairs);
XSF_API xsf_status xsf_pairs_count(const xsf_pairs* pairs, size_t* out);
XSF_API xsf_status xsf_pairs_min_similarity(const xsf_pairs* pairs, double* out);
XSF_API xsf_status xsf_pairs_write(const xsf_pairs* pairs, const xsf_corpus* corpus, const char* path);

/* Pipeline stages. Optional paths may be NULL. */
XSF_API xsf_status xsf_align(const xsf_store* store, const xsf_config* cfg, xsf_pairs** out);
XSF_API xsf_status xsf_induce(const xsf_store* store, const xsf_pairs* direct, const xsf_config* cfg,
                              const char* components_path, xsf_pairs** out);
XSF_API xsf_status xsf_dedup(const xsf_store* store, const xsf_pairs* pairs, const xsf_config* cfg,
                             const char* groups_path, xsf_pairs** out);
XSF_API xsf_status xsf_split(const xsf_corpus* corpus, const xsf_pairs* pairs, const char* groups_path,
                             const xsf_config* cfg, const char* split_path);
XSF_API xsf_status xsf_materialize(const xsf_corpus* corpus, const xsf_pairs* pairs,
                                   const char* split_path, const char* groups_path,
                                   const xsf_config* cfg, const char* out_dir);
/* Pair-count matrix as TSV. `corpus` (may be NULL) fixes the language axis. */
XSF_API xsf_status xsf_stats_samples(const char* samples_dir, const xsf_corpus* corpus, char* buf,
                                     size_t cap, size_t* needed);
XSF_API xsf_status xsf_stats_pairs(const xsf_pairs* pairs, const xsf_corpus* corpus, char* buf,
                                   size_t cap, size_t* needed);
XSF_API xsf_status xsf_plan(const char* samples_dir, const xsf_config* cfg, const char* plan_path);
XSF_API xsf_status xsf_sample(const char* plan_path, const char* samples_dir, const xsf_config* cfg,
                              uint64_t steps, const char* out_path);

/* Language identification */
XSF_API xsf_status xsf_langid_train_corpus(const xsf_corpus* corpus, xsf_langid** out);
XSF_API xsf_status xsf_langid_load(const char* path, xsf_langid** out);
XSF_API void xsf_langid_destroy(xsf_langid* model);
XSF_API xsf_status xsf_langid_save(const xsf_langid* model, const char* path);
/* Distribution as a JSON object {"<lang>": p, ...}. */
XSF_API xsf_status xsf_langid_classify(const xsf_langid* model, const char* text, char* buf, size_t cap,
                                       size_t* needed);

/* Scores predictions against references. Exactly one of `langid` and
 * `langid_interchange_path` must be given. Writes per-sample JSONL scores
 * and a JSON aggregate report. */
XSF_API xsf_status xsf_evaluate(const char* predictions_path, const char* references_path,
                                const char* prediction_vectors_path, const char* reference_vectors_path,
                                const xsf_langid* langid, const char* langid_interchange_path,
                                const xsf_config* cfg, const char* scores_path, const char* report_path);
XSF_API xsf_status xsf_correlate_files(const char* x_path, const char* x_field, const char* y_path,
                                       const char* y_field, uint64_t min_samples, const char* out_path);

/* Format validators. `count` (may be NULL) receives the record count. */
XSF_API xsf_status xsf_validate_vectors(const char* path, size_t* count);
XSF_API xsf_status xsf_validate_langid_file(const char* path, size_t* count);
XSF_API xsf_status xsf_validate_corpus(const char* path, size_t* count);

/* Metric helpers */
XSF_API xsf_status xsf_length_penalty(uint64_t len_gen, uint64_t len_ref, int c, double* out);
XSF_API xsf_status xsf_rouge(const char* gen, const char* ref, xsf_rouge_variant variant,
                             double* precision, double* recall, double* f1);
/* Either output may be NULL; `*_defined` is 0 when the coefficient is
 * undefined (zero variance). */
XSF_API xsf_status xsf_correlate(const double* xs, const double* ys, size_t n, double* pearson,
                                 int* pearson_defined, double* spearman, int* spearman_defined);
XSF_API xsf_status xsf_segment_tokens(const char* text, size_t* out);
XSF_API xsf_status xsf_similarity(const float* a, const float* b, size_t dimension, float* out);

/* Writes the synthetic three-language corpus bundle into `dir`. */
XSF_API xsf_status xsf_synth(const char* dir, uint64_t seed, size_t stories, uint32_t dimension);

/* Hashing and run manifests */
XSF_API xsf_status xsf_file_sha256(const char* path, char* buf, size_t cap, size_t* needed);
/* Records the stage, the config digest, and SHA-256 digests of each input and
 * output file (directories are hashed over their index and listed files). */
XSF_API xsf_status xsf_write_run_manifest(const char* stage, const xsf_config* cfg,
                                          const char* const* inputs, size_t n_inputs,
                                          const char* const* outputs, size_t n_outputs,
                                          const char* manifest_path);

#ifdef __cplusplus
}
#endif

#endif  /* XSUM_FORGE_XSUM_FORGE_H_ */
