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

#include "pmimask/masker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmimask/error.hpp"
#include "pmimask/rng.hpp"

namespace pmimask {

void MaskerOptions::Validate() const {
  if (candidates < 1) throw Error(ErrorCode::kInvalidArgument, "candidate count must be >= 1");
  if (!(rate > 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "masking rate must lie in (0, 1)");
  }
}

std::size_t MaskBudget(std::size_t n_eligible, double rate) {
  if (n_eligible == 0) return 0;
  const auto k = static_cast<long long>(std::llround(rate * static_cast<double>(n_eligible)));
  return static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(n_eligible)));
}

double InformativeRelevance(std::span<const TokenId> tokens, std::span<const Position> masked,
                            const PmiTable& pmi, bool clip_negative) {
  const std::size_t n = tokens.size();
  std::vector<Position> rows(masked.begin(), masked.end());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::vector<char> in_mask(n, 0);
  for (Position p : rows) {
    if (p >= n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "masked position " + std::to_string(p) + " outside document of length " +
                      std::to_string(n));
    }
    in_mask[p] = 1;
  }
  double score = 0.0;
  for (Position i : rows) {
    const TokenId wi = tokens[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (in_mask[j]) continue;
      const double v = pmi.Lookup(wi, tokens[j]);
      score += clip_negative && v < 0.0 ? 0.0 : v;
    }
  }
  return score;
}

std::vector<std::vector<Position>> SampleCandidates(std::span<const Position> eligible,
                                                    std::uint32_t count, double rate,
                                                    std::uint64_t seed) {
  std::vector<std::vector<Position>> out;
  const std::size_t k = MaskBudget(eligible.size(), rate);
  if (k == 0) return out;
  out.reserve(count);
  Rng rng(seed);
  std::vector<Position> pool(eligible.begin(), eligible.end());
  for (std::uint32_t c = 0; c < count; ++c) {
    // Partial Fisher-Yates; the pool is a permutation of `eligible`, which is
    // all a uniform draw needs.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.Below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<Position> pick(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(pick.begin(), pick.end());
    out.push_back(std::move(pick));
  }
  return out;
}

namespace {

MaskingDecision ScoreAndChoose(const Document& doc,
                               std::vector<std::vector<Position>> candidates,
                               const PmiTable& pmi, bool clip_negative) {
  MaskingDecision decision;
  decision.doc_id = doc.doc_id;
  decision.all_scores.reserve(candidates.size());
  std::size_t best = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double score = InformativeRelevance(doc.tokens, candidates[c], pmi, clip_negative);
    decision.all_scores.push_back(score);
    if (score > decision.all_scores[best]) best = c;
  }
  decision.chosen.positions = std::move(candidates[best]);
  decision.chosen.score = decision.all_scores[best];
  return decision;
}

}  // namespace

std::optional<MaskingDecision> ChooseMasking(const Document& doc,
                                             std::span<const Position> eligible,
                                             const PmiTable& pmi, const MaskerOptions& options,
                                             std::uint64_t global_seed) {
  options.Validate();
  const std::uint64_t seed = DeriveSeed(global_seed, doc.doc_id, Stream::kCandidates);
  auto candidates = SampleCandidates(eligible, options.candidates, options.rate, seed);
  if (candidates.empty()) return std::nullopt;
  MaskingDecision d = ScoreAndChoose(doc, std::move(candidates), pmi, options.clip_negative);
  d.seed_used = seed;
  return d;
}

std::optional<MaskingDecision> ChooseMaskingExhaustive(const Document& doc,
                                                       std::span<const Position> eligible,
                                                       const PmiTable& pmi,
                                                       const MaskerOptions& options) {
  const std::size_t n = eligible.size();
  if (n > kMaxExhaustiveEligible) {
    throw Error(ErrorCode::kInvalidArgument,
                "exhaustive masking is limited to " + std::to_string(kMaxExhaustiveEligible) +
                    " eligible positions");
  }
  const std::size_t k = MaskBudget(n, options.rate);
  if (k == 0) return std::nullopt;
  std::vector<std::vector<Position>> all;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    std::vector<Position> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = eligible[idx[i]];
    all.push_back(std::move(pick));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return ScoreAndChoose(doc, std::move(all), pmi, options.clip_negative);
}

void CorruptionPolicy::Validate() const {
  if (p_mask < 0.0 || p_random < 0.0 || p_keep < 0.0 ||
      std::abs(p_mask + p_random + p_keep - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidPolicy,
                "corruption policy must be non-negative and sum to 1, got (" +
                    std::to_string(p_mask) + ", " + std::to_string(p_random) + ", " +
                    std::to_string(p_keep) + ")");
  }
}

CorruptedDocument ApplyCorruption(const Document& doc, std::span<const Position> positions,
                                  const Vocabulary& vocab, const CorruptionPolicy& policy,
                                  std::uint64_t seed) {
  policy.Validate();
  if (policy.p_mask > 0.0 && !vocab.mask_id()) {
    throw Error(ErrorCode::kInvalidPolicy, "policy masks tokens but the vocabulary has no mask token");
  }
  if (policy.p_random > 0.0 && vocab.regular_ids().empty()) {
    throw Error(ErrorCode::kInvalidPolicy, "policy draws random tokens from an empty vocabulary");
  }
  CorruptedDocument out{doc.doc_id, doc.tokens, {}};
  std::vector<Position> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Rng rng(seed);
  const auto& regular = vocab.regular_ids();
  for (Position p : sorted) {
    if (p >= doc.tokens.size()) {
      throw Error(ErrorCode::kInvalidArgument, "corruption position outside document");
    }
    out.labels.push_back({p, doc.tokens[p]});
    const double u = rng.Uniform();
    if (u < policy.p_mask) {
      out.tokens[p] = *vocab.mask_id();
    } else if (u < policy.p_mask + policy.p_random) {
      out.tokens[p] = regular[rng.Below(regular.size())];
    }
  }
  return out;
}

}  // namespace pmimask
