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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmimask/baselines.hpp"
#include "pmimask/masker.hpp"
#include "pmimask/rates.hpp"

namespace pmimask {

inline constexpr const char* kToolName = "pmimask";
inline constexpr const char* kToolVersion = "0.3.0";

// Every knob of the pipeline. Loaded from one JSON file, then overridden by
// command-line flags. Paths, worker count and batch size do not affect
// results and are excluded from the hash.
struct PipelineConfig {
  std::vector<std::string> corpus;
  std::string vocab;

  std::uint32_t window = 11;
  std::uint32_t pmi_vocab_size = kDefaultPmiVocabSize;
  std::uint32_t min_count = kDefaultMinCount;
  std::uint32_t candidates = kDefaultCandidates;
  double rate = kDefaultMaskRate;
  bool clip_negative = false;
  CorruptionPolicy policy;
  std::uint64_t seed = 0;

  double rate_fraction = 0.01;
  double convergence_threshold = kDefaultConvergenceThreshold;
  std::uint64_t checkpoint_interval = kDefaultCheckpointInterval;
  DeltaMode delta_mode = DeltaMode::kAbsolute;
  bool rescale_rates = false;
  std::uint32_t epochs = 1;

  SpanOptions span;
  SpanVocabularyOptions span_vocab;

  std::uint32_t workers = 1;
  std::uint32_t batch_size = 1024;

  /// Unknown keys are rejected with InvalidArgument.
  static PipelineConfig FromJson(const nlohmann::json& j);
  /// Loads `path` (if non-empty) and applies `overrides` on top.
  static PipelineConfig Load(const std::filesystem::path& path,
                             const nlohmann::json& overrides = nlohmann::json::object());

  nlohmann::ordered_json ToJson() const;
  /// Only the fields that influence outputs.
  nlohmann::ordered_json SemanticJson() const;
  /// 16 hex digits of FNV-1a over SemanticJson().dump().
  std::string Hash() const;
  void Validate() const;

  MaskerOptions masker() const { return {candidates, rate, clip_negative}; }
};

/// Writes `<output>.meta.json` next to an output file.
void WriteMetadata(const std::filesystem::path& output, const PipelineConfig& config,
                   const std::string& stage);

// Decision records: one JSON object per line with doc_id, masked_positions,
// score, candidate_scores and seed.
std::string DecisionToJsonLine(const MaskingDecision& decision);
MaskingDecision DecisionFromJsonLine(const std::string& line);
std::vector<MaskingDecision> ReadDecisions(const std::filesystem::path& path);

// Stage runners. Each returns a JSON report of what it did.
nlohmann::ordered_json RunCount(const PipelineConfig& config,
                                const std::filesystem::path& out_counts);
nlohmann::ordered_json RunPmi(const PipelineConfig& config,
                              const std::filesystem::path& counts,
                              const std::filesystem::path& out_pmi);
nlohmann::ordered_json RunMask(const PipelineConfig& config, const std::filesystem::path& pmi,
                               const std::filesystem::path& out_decisions,
                               const std::filesystem::path& out_corrupted,
                               const std::filesystem::path& out_labels);
nlohmann::ordered_json RunDeriveRates(const PipelineConfig& config,
                                      const std::filesystem::path& pmi,
                                      const std::filesystem::path& out_rates_tsv,
                                      const std::filesystem::path& out_rates_bin,
                                      const std::filesystem::path& out_convergence);
/// With `repeat_decisions`, replays the fixed decisions every epoch instead of
/// sampling from the rate table.
nlohmann::ordered_json RunApproxMask(const PipelineConfig& config,
                                     const std::filesystem::path& rates_bin,
                                     const std::optional<std::filesystem::path>& repeat_decisions,
                                     const std::filesystem::path& out_corrupted,
                                     const std::filesystem::path& out_labels);
struct CompareInputs {
  std::vector<std::string> strategies;
  std::optional<std::filesystem::path> pmi;
  std::optional<std::filesystem::path> rates;
  std::optional<std::filesystem::path> counts;
};
nlohmann::ordered_json RunCompare(const PipelineConfig& config, const CompareInputs& inputs,
                                  const std::filesystem::path& out_tsv,
                                  const std::filesystem::path& out_summary);
/// Identifies an artifact by content and summarises it.
nlohmann::ordered_json DescribeArtifact(const PipelineConfig& config,
                                        const std::filesystem::path& path);

/// Output path for one epoch: unchanged for a single epoch, otherwise
/// "<stem>.epoch<N><ext>".
std::filesystem::path EpochPath(const std::filesystem::path& path, std::uint32_t epoch,
                                std::uint32_t epochs);

}  // namespace pmimask
