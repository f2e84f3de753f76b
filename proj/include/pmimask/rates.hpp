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
#include <span>
#include <vector>

#include "pmimask/corpus.hpp"
#include "pmimask/masker.hpp"
#include "pmimask/types.hpp"

namespace pmimask {

inline constexpr std::uint32_t kRatesVersion = 1;
inline constexpr double kDefaultConvergenceThreshold = 0.008;
inline constexpr std::uint64_t kDefaultCheckpointInterval = 1000;

// Per-token masking frequencies observed while running sample-and-score over
// part of a corpus. rate(t) = masked(t) / occurrences(t), or the target rate
// for tokens never seen.
class RateTable {
 public:
  RateTable() = default;
  RateTable(std::uint32_t vocab_size, double target_rate);

  std::uint32_t vocab_size() const noexcept {
    return static_cast<std::uint32_t>(occurrences_.size());
  }
  double target_rate() const noexcept { return target_rate_; }
  double scale() const noexcept { return scale_; }
  std::uint64_t docs_processed() const noexcept { return docs_processed_; }
  const std::vector<std::uint64_t>& occurrences() const noexcept { return occurrences_; }
  const std::vector<std::uint64_t>& masked_count() const noexcept { return masked_; }

  double Rate(TokenId t) const noexcept;
  /// Occurrence-weighted mean of Rate() over seen tokens.
  double OverallRate() const noexcept;

  /// Counts every eligible position of `doc` once and every masked position
  /// once more in the numerator. Masked positions must be eligible.
  void Accumulate(const Document& doc, std::span<const Position> eligible,
                  std::span<const Position> masked);
  /// Throws AlignmentError when decision.doc_id != doc.doc_id.
  void Accumulate(const MaskingDecision& decision, const Document& doc,
                  std::span<const Position> eligible);
  /// Counts a document that produced no decision.
  void AccumulateSkipped() noexcept { ++docs_processed_; }

  /// Sums numerators and denominators. Throws ShardMismatch on vocab size.
  void MergeFrom(const RateTable& other);

  /// Multiplies every seen-token rate so that OverallRate() equals the target
  /// (rates are capped at 1, so the result can fall short).
  void RescaleToTarget();

  void SaveTsv(const std::filesystem::path& path, const Vocabulary& vocab) const;
  void SaveBinary(const std::filesystem::path& path) const;
  static RateTable LoadBinary(const std::filesystem::path& path);

  friend bool operator==(const RateTable&, const RateTable&) = default;

 private:
  std::vector<std::uint64_t> occurrences_;
  std::vector<std::uint64_t> masked_;
  double target_rate_ = kDefaultMaskRate;
  double scale_ = 1.0;
  std::uint64_t docs_processed_ = 0;
};

enum class DeltaMode { kAbsolute, kRelative };

/// Mean over tokens seen in both tables of |curr - prev| (absolute) or
/// |curr - prev| / prev (relative, tokens with prev == 0 excluded). Throws
/// Undefined when no token qualifies and ShardMismatch on vocab size.
double ConvergenceDelta(const RateTable& prev, const RateTable& curr,
                        DeltaMode mode = DeltaMode::kAbsolute);

/// Independent Bernoulli(rate[token]) per eligible position. When the draw is
/// empty, the eligible position with the highest rate (lowest position on
/// ties) is masked. Empty output only when nothing is eligible.
std::vector<Position> ApproximateMask(const Document& doc, std::span<const Position> eligible,
                                      const RateTable& rates, std::uint64_t seed);

struct FidelityReport {
  double mean_abs_diff = 0.0;
  double max_abs_diff = 0.0;
  double overall_reference = 0.0;
  double overall_candidate = 0.0;
  std::size_t tokens_compared = 0;
};

/// Per-token divergence between a reference table and a replayed one, over
/// tokens seen in both with at least `min_occurrences` reference occurrences.
FidelityReport CompareRates(const RateTable& reference, const RateTable& candidate,
                            std::uint64_t min_occurrences = 1);

}  // namespace pmimask
