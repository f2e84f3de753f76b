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

#include "pmimask/pmimask.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmimask/cooccur.hpp"
#include "pmimask/corpus.hpp"
#include "pmimask/error.hpp"
#include "pmimask/masker.hpp"
#include "pmimask/pipeline.hpp"
#include "pmimask/pmi.hpp"
#include "pmimask/rates.hpp"

struct pmk_pipeline {
  pmimask::PipelineConfig config;
  std::string config_json;
  std::string hash;
  std::string report = "{}";
};

struct pmk_vocab {
  pmimask::Vocabulary vocab;
};

struct pmk_counts {
  pmimask::CooccurrenceTable table;
};

struct pmk_pmi {
  pmimask::PmiTable table;
};

struct pmk_rates {
  pmimask::RateTable table;
};

namespace {

thread_local std::string last_error;

pmk_status Fail(pmk_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

pmk_status StatusOf(pmimask::ErrorCode code) { return static_cast<pmk_status>(code); }

template <typename Fn>
pmk_status Guard(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const pmimask::Error& e) {
    return Fail(StatusOf(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(PMK_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(PMK_INTERNAL, e.what());
  }
}

pmk_status NullArgument(const char* name) {
  return Fail(PMK_INVALID_ARGUMENT, std::string(name) + " must not be null");
}

std::optional<std::filesystem::path> OptionalPath(const char* p) {
  if (p == nullptr || *p == '\0') return std::nullopt;
  return std::filesystem::path(p);
}

std::vector<pmimask::Position> EligibleOrAll(const uint32_t* eligible, size_t n_eligible,
                                             size_t n_tokens) {
  std::vector<pmimask::Position> out;
  if (eligible == nullptr) {
    out.resize(n_tokens);
    for (size_t i = 0; i < n_tokens; ++i) out[i] = static_cast<pmimask::Position>(i);
    return out;
  }
  out.assign(eligible, eligible + n_eligible);
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] >= n_tokens || (i > 0 && out[i] <= out[i - 1])) {
      throw pmimask::Error(pmimask::ErrorCode::kInvalidArgument,
                           "eligible positions must be ascending and inside the document");
    }
  }
  return out;
}

pmk_status CopyPositions(const std::vector<pmimask::Position>& src, uint32_t* dst,
                         size_t capacity, size_t* n_out) {
  if (n_out) *n_out = src.size();
  if (src.size() > capacity) {
    return Fail(PMK_BUFFER_TOO_SMALL, "position buffer holds " + std::to_string(capacity) +
                                          ", need " + std::to_string(src.size()));
  }
  if (!src.empty()) std::memcpy(dst, src.data(), src.size() * sizeof(uint32_t));
  return PMK_OK;
}

template <typename Fn>
pmk_status RunStage(pmk_pipeline* p, Fn&& fn) {
  if (!p) return NullArgument("pipeline");
  return Guard([&] {
    p->report = fn().dump();
    return PMK_OK;
  });
}

}  // namespace

extern "C" {

const char* pmk_version(void) { return pmimask::kToolVersion; }

const char* pmk_last_error(void) { return last_error.c_str(); }

const char* pmk_status_name(pmk_status status) {
  switch (status) {
    case PMK_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case PMK_INTERNAL: return "Internal";
    default:
      if (status >= PMK_OK && status <= PMK_MISSING_ARTIFACT) {
        return pmimask::ErrorCodeName(static_cast<pmimask::ErrorCode>(status));
      }
      return "Unknown";
  }
}

int pmk_status_exit_code(pmk_status status) {
  switch (status) {
    case PMK_OK: return 0;
    case PMK_INVALID_ARGUMENT:
    case PMK_UNKNOWN_STRATEGY:
    case PMK_INVALID_POLICY: return 1;
    case PMK_IO_ERROR:
    case PMK_MISSING_ARTIFACT: return 2;
    default: return 3;
  }
}

pmk_status pmk_pipeline_create(const char* config_path, const char* overrides_json,
                               pmk_pipeline** out) {
  if (!out) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    nlohmann::json overrides = nlohmann::json::object();
    if (overrides_json && *overrides_json) {
      try {
        overrides = nlohmann::json::parse(overrides_json);
      } catch (const nlohmann::json::exception& e) {
        return Fail(PMK_INVALID_ARGUMENT, std::string("overrides: ") + e.what());
      }
    }
    auto p = std::make_unique<pmk_pipeline>();
    p->config = pmimask::PipelineConfig::Load(config_path ? config_path : "", overrides);
    *out = p.release();
    return PMK_OK;
  });
}

void pmk_pipeline_destroy(pmk_pipeline* pipeline) { delete pipeline; }

const char* pmk_pipeline_config_json(pmk_pipeline* p) {
  if (!p) return nullptr;
  p->config_json = p->config.ToJson().dump(2);
  return p->config_json.c_str();
}

const char* pmk_pipeline_config_hash(pmk_pipeline* p) {
  if (!p) return nullptr;
  p->hash = p->config.Hash();
  return p->hash.c_str();
}

const char* pmk_pipeline_report(const pmk_pipeline* p) { return p ? p->report.c_str() : nullptr; }

pmk_status pmk_pipeline_count(pmk_pipeline* p, const char* out_counts) {
  if (!out_counts) return NullArgument("out_counts");
  return RunStage(p, [&] { return pmimask::RunCount(p->config, out_counts); });
}

pmk_status pmk_pipeline_pmi(pmk_pipeline* p, const char* counts, const char* out_pmi) {
  if (!counts || !out_pmi) return NullArgument("counts/out_pmi");
  return RunStage(p, [&] { return pmimask::RunPmi(p->config, counts, out_pmi); });
}

pmk_status pmk_pipeline_mask(pmk_pipeline* p, const char* pmi, const char* out_decisions,
                             const char* out_corrupted, const char* out_labels) {
  if (!pmi || !out_decisions || !out_corrupted || !out_labels) return NullArgument("path");
  return RunStage(p, [&] {
    return pmimask::RunMask(p->config, pmi, out_decisions, out_corrupted, out_labels);
  });
}

pmk_status pmk_pipeline_derive_rates(pmk_pipeline* p, const char* pmi, const char* out_rates_tsv,
                                     const char* out_rates_bin, const char* out_convergence) {
  if (!pmi || !out_rates_tsv || !out_rates_bin || !out_convergence) return NullArgument("path");
  return RunStage(p, [&] {
    return pmimask::RunDeriveRates(p->config, pmi, out_rates_tsv, out_rates_bin, out_convergence);
  });
}

pmk_status pmk_pipeline_approx_mask(pmk_pipeline* p, const char* rates_bin,
                                    const char* repeat_decisions, const char* out_corrupted,
                                    const char* out_labels) {
  if (!out_corrupted || !out_labels) return NullArgument("path");
  const auto repeat = OptionalPath(repeat_decisions);
  if (!repeat && !OptionalPath(rates_bin)) {
    return Fail(PMK_MISSING_ARTIFACT, "approx-mask requires a rates file or a decisions file");
  }
  return RunStage(p, [&] {
    return pmimask::RunApproxMask(p->config, rates_bin ? rates_bin : "", repeat, out_corrupted,
                                  out_labels);
  });
}

pmk_status pmk_pipeline_compare(pmk_pipeline* p, const char* strategies, const char* pmi,
                                const char* rates_bin, const char* counts, const char* out_tsv,
                                const char* out_summary) {
  if (!strategies || !out_tsv || !out_summary) return NullArgument("strategies/output");
  return RunStage(p, [&] {
    pmimask::CompareInputs inputs;
    std::stringstream list(strategies);
    std::string name;
    while (std::getline(list, name, ',')) {
      if (!name.empty()) inputs.strategies.push_back(name);
    }
    inputs.pmi = OptionalPath(pmi);
    inputs.rates = OptionalPath(rates_bin);
    inputs.counts = OptionalPath(counts);
    return pmimask::RunCompare(p->config, inputs, out_tsv, out_summary);
  });
}

pmk_status pmk_pipeline_describe(pmk_pipeline* p, const char* path) {
  if (!path) return NullArgument("path");
  return RunStage(p, [&] { return pmimask::DescribeArtifact(p->config, path); });
}

pmk_status pmk_vocab_load(const char* path, pmk_vocab** out) {
  if (!path || !out) return NullArgument("path/out");
  *out = nullptr;
  return Guard([&] {
    *out = new pmk_vocab{pmimask::Vocabulary::Load(path)};
    return PMK_OK;
  });
}

void pmk_vocab_destroy(pmk_vocab* vocab) { delete vocab; }

size_t pmk_vocab_size(const pmk_vocab* vocab) { return vocab ? vocab->vocab.size() : 0; }

pmk_status pmk_vocab_find(const pmk_vocab* vocab, const char* token, uint32_t* id) {
  if (!vocab || !token || !id) return NullArgument("vocab/token/id");
  const auto found = vocab->vocab.Find(token);
  if (!found) return Fail(PMK_INVALID_TOKEN, std::string("token not in vocabulary: ") + token);
  *id = *found;
  return PMK_OK;
}

const char* pmk_vocab_token(const pmk_vocab* vocab, uint32_t id) {
  if (!vocab || id >= vocab->vocab.size()) return nullptr;
  return vocab->vocab.Token(id).c_str();
}

int pmk_vocab_is_special(const pmk_vocab* vocab, uint32_t id) {
  return vocab && vocab->vocab.IsSpecial(id) ? 1 : 0;
}

pmk_status pmk_counts_create(uint32_t vocab_size, uint32_t window, pmk_counts** out) {
  if (!out) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    *out = new pmk_counts{pmimask::CooccurrenceTable(vocab_size, window)};
    return PMK_OK;
  });
}

pmk_status pmk_counts_load(const char* path, pmk_counts** out) {
  if (!path || !out) return NullArgument("path/out");
  *out = nullptr;
  return Guard([&] {
    *out = new pmk_counts{pmimask::CooccurrenceTable::Load(path)};
    return PMK_OK;
  });
}

void pmk_counts_destroy(pmk_counts* counts) { delete counts; }

pmk_status pmk_counts_add_document(pmk_counts* counts, const uint32_t* tokens, size_t n_tokens) {
  if (!counts || (!tokens && n_tokens)) return NullArgument("counts/tokens");
  return Guard([&] {
    counts->table.CountDocument({tokens, n_tokens});
    return PMK_OK;
  });
}

pmk_status pmk_counts_merge(pmk_counts* into, const pmk_counts* from) {
  if (!into || !from) return NullArgument("counts");
  return Guard([&] {
    into->table.MergeFrom(from->table);
    return PMK_OK;
  });
}

pmk_status pmk_counts_save(const pmk_counts* counts, const char* path) {
  if (!counts || !path) return NullArgument("counts/path");
  return Guard([&] {
    counts->table.Save(path);
    return PMK_OK;
  });
}

uint64_t pmk_counts_pair(const pmk_counts* counts, uint32_t a, uint32_t b) {
  return counts ? counts->table.PairCount(a, b) : 0;
}

uint64_t pmk_counts_unigram(const pmk_counts* counts, uint32_t id) {
  if (!counts || id >= counts->table.vocab_size()) return 0;
  return counts->table.unigram()[id];
}

uint64_t pmk_counts_total_pairs(const pmk_counts* counts) {
  return counts ? counts->table.total_pairs() : 0;
}

pmk_status pmk_pmi_build(const pmk_counts* counts, uint32_t pmi_vocab_size, uint32_t min_count,
                         pmk_pmi** out) {
  if (!counts || !out) return NullArgument("counts/out");
  *out = nullptr;
  return Guard([&] {
    *out = new pmk_pmi{pmimask::PmiTable::Build(counts->table, pmi_vocab_size, min_count)};
    return PMK_OK;
  });
}

pmk_status pmk_pmi_load(const char* path, pmk_pmi** out) {
  if (!path || !out) return NullArgument("path/out");
  *out = nullptr;
  return Guard([&] {
    *out = new pmk_pmi{pmimask::PmiTable::Load(path)};
    return PMK_OK;
  });
}

void pmk_pmi_destroy(pmk_pmi* pmi) { delete pmi; }

pmk_status pmk_pmi_save(const pmk_pmi* pmi, const char* path) {
  if (!pmi || !path) return NullArgument("pmi/path");
  return Guard([&] {
    pmi->table.Save(path);
    return PMK_OK;
  });
}

double pmk_pmi_lookup(const pmk_pmi* pmi, uint32_t a, uint32_t b) {
  return pmi ? pmi->table.Lookup(a, b) : 0.0;
}

size_t pmk_pmi_value_count(const pmk_pmi* pmi) { return pmi ? pmi->table.value_count() : 0; }

pmk_status pmk_informative_relevance(const uint32_t* tokens, size_t n_tokens,
                                     const uint32_t* masked, size_t n_masked, const pmk_pmi* pmi,
                                     int clip_negative, double* out) {
  if (!pmi || !out || (!tokens && n_tokens) || (!masked && n_masked)) {
    return NullArgument("argument");
  }
  return Guard([&] {
    for (size_t i = 0; i < n_masked; ++i) {
      if (masked[i] >= n_tokens) {
        return Fail(PMK_INVALID_ARGUMENT, "masked position outside the document");
      }
    }
    *out = pmimask::InformativeRelevance({tokens, n_tokens}, {masked, n_masked}, pmi->table,
                                         clip_negative != 0);
    return PMK_OK;
  });
}

pmk_masker_options pmk_masker_defaults(void) {
  return {pmimask::kDefaultCandidates, pmimask::kDefaultMaskRate, 0};
}

pmk_status pmk_choose_masking(const pmk_pmi* pmi, uint64_t doc_id, const uint32_t* tokens,
                              size_t n_tokens, const uint32_t* eligible, size_t n_eligible,
                              const pmk_masker_options* options, uint64_t global_seed,
                              uint32_t* positions, size_t capacity, size_t* n_positions,
                              double* score) {
  if (!pmi || !options || (!tokens && n_tokens) || (!positions && capacity)) {
    return NullArgument("argument");
  }
  return Guard([&] {
    pmimask::Document doc{doc_id, {tokens, tokens + n_tokens}};
    const auto elig = EligibleOrAll(eligible, n_eligible, n_tokens);
    const pmimask::MaskerOptions opts{options->candidates, options->rate,
                                      options->clip_negative != 0};
    const auto decision = pmimask::ChooseMasking(doc, elig, pmi->table, opts, global_seed);
    if (score) *score = decision ? decision->chosen.score : 0.0;
    return CopyPositions(decision ? decision->chosen.positions : std::vector<pmimask::Position>{},
                         positions, capacity, n_positions);
  });
}

pmk_status pmk_rates_load(const char* path, pmk_rates** out) {
  if (!path || !out) return NullArgument("path/out");
  *out = nullptr;
  return Guard([&] {
    *out = new pmk_rates{pmimask::RateTable::LoadBinary(path)};
    return PMK_OK;
  });
}

void pmk_rates_destroy(pmk_rates* rates) { delete rates; }

double pmk_rates_rate(const pmk_rates* rates, uint32_t id) {
  return rates ? rates->table.Rate(id) : 0.0;
}

double pmk_rates_overall(const pmk_rates* rates) {
  return rates ? rates->table.OverallRate() : 0.0;
}

pmk_status pmk_approximate_mask(const pmk_rates* rates, uint64_t doc_id, const uint32_t* tokens,
                                size_t n_tokens, const uint32_t* eligible, size_t n_eligible,
                                uint64_t seed, uint32_t* positions, size_t capacity,
                                size_t* n_positions) {
  if (!rates || (!tokens && n_tokens) || (!positions && capacity)) return NullArgument("argument");
  return Guard([&] {
    pmimask::Document doc{doc_id, {tokens, tokens + n_tokens}};
    const auto elig = EligibleOrAll(eligible, n_eligible, n_tokens);
    return CopyPositions(pmimask::ApproximateMask(doc, elig, rates->table, seed), positions,
                         capacity, n_positions);
  });
}

}  // extern "C"
