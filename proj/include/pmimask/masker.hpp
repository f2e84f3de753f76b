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
#include <optional>
#include <span>
#include <vector>

#include "pmimask/corpus.hpp"
#include "pmimask/pmi.hpp"
#include "pmimask/types.hpp"

namespace pmimask {

inline constexpr std::uint32_t kDefaultCandidates = 30;
inline constexpr double kDefaultMaskRate = 0.15;
inline constexpr std::size_t kMaxExhaustiveEligible = 20;

struct MaskingCandidate {
  std::vector<Position> positions;  // ascending, distinct
  double score = 0.0;

  friend bool operator==(const MaskingCandidate&, const MaskingCandidate&) = default;
};

struct MaskingDecision {
  DocId doc_id = 0;
  MaskingCandidate chosen;
  std::vector<double> all_scores;  // in sampling order
  std::uint64_t seed_used = 0;

  friend bool operator==(const MaskingDecision&, const MaskingDecision&) = default;
};

struct MaskerOptions {
  std::uint32_t candidates = kDefaultCandidates;
  double rate = kDefaultMaskRate;
  // Ablation: treat negative PMI as zero when scoring.
  bool clip_negative = false;

  void Validate() const;
};

/// Masks per document: clamp(round(rate * n_eligible), 1, n_eligible), and 0
/// when nothing is eligible.
std::size_t MaskBudget(std::size_t n_eligible, double rate);

/// Sum of pmi(tokens[i], tokens[j]) over masked i and unmasked j, visiting i
/// ascending and then j ascending. Positions, not token types, drive the sum.
double InformativeRelevance(std::span<const TokenId> tokens, std::span<const Position> masked,
                            const PmiTable& pmi, bool clip_negative = false);

/// `count` independent uniform size-k subsets of `eligible` (k from
/// MaskBudget), each sorted. Empty when `eligible` is empty.
std::vector<std::vector<Position>> SampleCandidates(std::span<const Position> eligible,
                                                    std::uint32_t count, double rate,
                                                    std::uint64_t seed);

/// Sample-and-score: draws options.candidates candidates, scores each and keeps
/// the first maximum. Returns nullopt when the document has no eligible
/// position.
std::optional<MaskingDecision> ChooseMasking(const Document& doc,
                                             std::span<const Position> eligible,
                                             const PmiTable& pmi, const MaskerOptions& options,
                                             std::uint64_t global_seed);

/// Scores every size-k subset in lexicographic order. Intended as a test
/// oracle; throws InvalidArgument past kMaxExhaustiveEligible positions.
std::optional<MaskingDecision> ChooseMaskingExhaustive(const Document& doc,
                                                       std::span<const Position> eligible,
                                                       const PmiTable& pmi,
                                                       const MaskerOptions& options);

struct CorruptionPolicy {
  double p_mask = 0.8;
  double p_random = 0.1;
  double p_keep = 0.1;

  /// Throws InvalidPolicy unless all parts are >= 0 and sum to 1 within 1e-9.
  void Validate() const;
};

struct Label {
  Position position = 0;
  TokenId original = 0;

  friend bool operator==(const Label&, const Label&) = default;
};

struct CorruptedDocument {
  DocId doc_id = 0;
  std::vector<TokenId> tokens;
  std::vector<Label> labels;  // one per chosen position, ascending
};

/// Replaces each chosen position by the mask id, a uniformly drawn regular id,
/// or itself, with the policy's probabilities. Other positions are untouched.
CorruptedDocument ApplyCorruption(const Document& doc, std::span<const Position> positions,
                                  const Vocabulary& vocab, const CorruptionPolicy& policy,
                                  std::uint64_t seed);

}  // namespace pmimask
