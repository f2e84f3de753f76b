// Copyright 2026 The pmimask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PMIMASK_PMIMASK_H_
#define PMIMASK_PMIMASK_H_

/* C interface to the pmimask library. Every function that can fail returns a
 * pmk_status; the message of the most recent failure on the calling thread is
 * available from pmk_last_error(). Handles are opaque and owned by the caller,
 * who releases them with the matching *_destroy function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PMK_API __declspec(dllexport)
#else
#define PMK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmk_status {
  PMK_OK = 0,
  PMK_INVALID_ARGUMENT = 1,
  PMK_IO_ERROR = 2,
  PMK_DUPLICATE_TOKEN = 3,
  PMK_FORMAT_ERROR = 4,
  PMK_INVALID_TOKEN = 5,
  PMK_SHARD_MISMATCH = 6,
  PMK_EMPTY_COUNTS = 7,
  PMK_EMPTY_DOCUMENT = 8,
  PMK_INVALID_POLICY = 9,
  PMK_ALIGNMENT_ERROR = 10,
  PMK_UNDEFINED = 11,
  PMK_UNKNOWN_STRATEGY = 12,
  PMK_MISSING_ARTIFACT = 13,
  PMK_BUFFER_TOO_SMALL = 100,
  PMK_INTERNAL = 101
} pmk_status;

PMK_API const char* pmk_version(void);
PMK_API const char* pmk_last_error(void);
PMK_API const char* pmk_status_name(pmk_status status);
/* 0 for PMK_OK, 1 for usage errors, 2 for I/O and missing inputs, 3 for data
 * errors. */
PMK_API int pmk_status_exit_code(pmk_status status);

/* ------------------------------------------------------------------------ */
/* Pipeline stages driven by a configuration.                               */

typedef struct pmk_pipeline pmk_pipeline;

/* config_path may be NULL; overrides_json is a JSON object (or NULL) whose
 * keys replace those of the file. */
PMK_API pmk_status pmk_pipeline_create(const char* config_path, const char* overrides_json,
                                       pmk_pipeline** out);
PMK_API void pmk_pipeline_destroy(pmk_pipeline* pipeline);

/* Effective configuration and the report of the last successful stage, as
 * JSON. The pointers stay valid until the next call on the same handle. */
PMK_API const char* pmk_pipeline_config_json(pmk_pipeline* pipeline);
PMK_API const char* pmk_pipeline_config_hash(pmk_pipeline* pipeline);
PMK_API const char* pmk_pipeline_report(const pmk_pipeline* pipeline);

PMK_API pmk_status pmk_pipeline_count(pmk_pipeline* pipeline, const char* out_counts);
PMK_API pmk_status pmk_pipeline_pmi(pmk_pipeline* pipeline, const char* counts,
                                    const char* out_pmi);
PMK_API pmk_status pmk_pipeline_mask(pmk_pipeline* pipeline, const char* pmi,
                                     const char* out_decisions, const char* out_corrupted,
                                     const char* out_labels);
PMK_API pmk_status pmk_pipeline_derive_rates(pmk_pipeline* pipeline, const char* pmi,
                                             const char* out_rates_tsv,
                                             const char* out_rates_bin,
                                             const char* out_convergence);
/* With repeat_decisions non-NULL the stored decisions are replayed and
 * rates_bin is ignored. */
PMK_API pmk_status pmk_pipeline_approx_mask(pmk_pipeline* pipeline, const char* rates_bin,
                                            const char* repeat_decisions,
                                            const char* out_corrupted, const char* out_labels);
/* strategies is a comma-separated list of strategy names. Artifact paths may
 * be NULL when no selected strategy needs them. */
PMK_API pmk_status pmk_pipeline_compare(pmk_pipeline* pipeline, const char* strategies,
                                        const char* pmi, const char* rates_bin,
                                        const char* counts, const char* out_tsv,
                                        const char* out_summary);
/* Summarizes a counts, PMI, rates, decisions or corpus file into the report. */
PMK_API pmk_status pmk_pipeline_describe(pmk_pipeline* pipeline, const char* path);

/* ------------------------------------------------------------------------ */
/* Vocabulary.                                                              */

typedef struct pmk_vocab pmk_vocab;

PMK_API pmk_status pmk_vocab_load(const char* path, pmk_vocab** out);
PMK_API void pmk_vocab_destroy(pmk_vocab* vocab);
PMK_API size_t pmk_vocab_size(const pmk_vocab* vocab);
/* PMK_INVALID_TOKEN when the token is absent. */
PMK_API pmk_status pmk_vocab_find(const pmk_vocab* vocab, const char* token, uint32_t* id);
/* NULL when id is out of range. */
PMK_API const char* pmk_vocab_token(const pmk_vocab* vocab, uint32_t id);
PMK_API int pmk_vocab_is_special(const pmk_vocab* vocab, uint32_t id);

/* ------------------------------------------------------------------------ */
/* Co-occurrence counts.                                                    */

typedef struct pmk_counts pmk_counts;

PMK_API pmk_status pmk_counts_create(uint32_t vocab_size, uint32_t window, pmk_counts** out);
PMK_API pmk_status pmk_counts_load(const char* path, pmk_counts** out);
PMK_API void pmk_counts_destroy(pmk_counts* counts);
PMK_API pmk_status pmk_counts_add_document(pmk_counts* counts, const uint32_t* tokens,
                                           size_t n_tokens);
PMK_API pmk_status pmk_counts_merge(pmk_counts* into, const pmk_counts* from);
PMK_API pmk_status pmk_counts_save(const pmk_counts* counts, const char* path);
PMK_API uint64_t pmk_counts_pair(const pmk_counts* counts, uint32_t a, uint32_t b);
PMK_API uint64_t pmk_counts_unigram(const pmk_counts* counts, uint32_t id);
PMK_API uint64_t pmk_counts_total_pairs(const pmk_counts* counts);

/* ------------------------------------------------------------------------ */
/* PMI tables.                                                              */

typedef struct pmk_pmi pmk_pmi;

PMK_API pmk_status pmk_pmi_build(const pmk_counts* counts, uint32_t pmi_vocab_size,
                                 uint32_t min_count, pmk_pmi** out);
PMK_API pmk_status pmk_pmi_load(const char* path, pmk_pmi** out);
PMK_API void pmk_pmi_destroy(pmk_pmi* pmi);
PMK_API pmk_status pmk_pmi_save(const pmk_pmi* pmi, const char* path);
/* Stored value, or 0 for pairs without one. Symmetric in a and b. */
PMK_API double pmk_pmi_lookup(const pmk_pmi* pmi, uint32_t a, uint32_t b);
PMK_API size_t pmk_pmi_value_count(const pmk_pmi* pmi);

/* ------------------------------------------------------------------------ */
/* Masking.                                                                 */

/* Sum of PMI between masked and unmasked positions. */
PMK_API pmk_status pmk_informative_relevance(const uint32_t* tokens, size_t n_tokens,
                                             const uint32_t* masked, size_t n_masked,
                                             const pmk_pmi* pmi, int clip_negative,
                                             double* out);

typedef struct pmk_masker_options {
  uint32_t candidates;
  double rate;
  int clip_negative;
} pmk_masker_options;

PMK_API pmk_masker_options pmk_masker_defaults(void);

/* Chooses masked positions for one document. eligible lists the positions
 * that may be masked (ascending); NULL means every position. At most
 * capacity positions are written; *n_positions receives the full count and
 * PMK_BUFFER_TOO_SMALL is returned when it exceeds capacity. A document with
 * nothing eligible yields zero positions. score may be NULL. */
PMK_API pmk_status pmk_choose_masking(const pmk_pmi* pmi, uint64_t doc_id,
                                      const uint32_t* tokens, size_t n_tokens,
                                      const uint32_t* eligible, size_t n_eligible,
                                      const pmk_masker_options* options, uint64_t global_seed,
                                      uint32_t* positions, size_t capacity,
                                      size_t* n_positions, double* score);

/* ------------------------------------------------------------------------ */
/* Per-token masking rates.                                                 */

typedef struct pmk_rates pmk_rates;

PMK_API pmk_status pmk_rates_load(const char* path, pmk_rates** out);
PMK_API void pmk_rates_destroy(pmk_rates* rates);
PMK_API double pmk_rates_rate(const pmk_rates* rates, uint32_t id);
PMK_API double pmk_rates_overall(const pmk_rates* rates);

/* Independent per-position Bernoulli draws at the stored rates. Buffer
 * conventions as for pmk_choose_masking. */
PMK_API pmk_status pmk_approximate_mask(const pmk_rates* rates, uint64_t doc_id,
                                        const uint32_t* tokens, size_t n_tokens,
                                        const uint32_t* eligible, size_t n_eligible,
                                        uint64_t seed, uint32_t* positions, size_t capacity,
                                        size_t* n_positions);

#ifdef __cplusplus
}
#endif

#endif  /* PMIMASK_PMIMASK_H_ */
