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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pmimask/cooccur.hpp"
#include "pmimask/corpus.hpp"
#include "pmimask/masker.hpp"
#include "pmimask/pmi.hpp"
#include "pmimask/rates.hpp"
#include "pmimask/rng.hpp"

namespace pmimask {

// ---------------------------------------------------------------------------
// Uniform random and geometric span masking
// ---------------------------------------------------------------------------

/// Uniform subset of MaskBudget(|eligible|, rate) eligible positions, sorted.
std::vector<Position> RandomMask(std::span<const Position> eligible, double rate,
                                 std::uint64_t seed);

struct SpanOptions {
  double p_geo = 0.2;
  std::uint32_t max_span = 10;

  void Validate() const;
};

/// P(len = l) for l in 1..max_span: Geometric(p) renormalised after
/// truncation. Index 0 holds l = 1.
std::vector<double> TruncatedGeometricPmf(double p, std::uint32_t max_span);

class SpanLengthSampler {
 public:
  explicit SpanLengthSampler(const SpanOptions& options);
  std::uint32_t operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

/// Masks runs of consecutive eligible positions with truncated-geometric
/// lengths and uniform starts until exactly MaskBudget positions are masked.
/// Runs are clipped at the end, already-masked positions are skipped and the
/// last run is trimmed.
std::vector<Position> SpanMask(std::span<const Position> eligible, double rate,
                               const SpanOptions& options, std::uint64_t seed);

// ---------------------------------------------------------------------------
// PMI span masking
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxNgram = 5;

struct NGram {
  std::array<TokenId, kMaxNgram> ids{};
  std::uint8_t len = 0;

  std::span<const TokenId> tokens() const { return {ids.data(), len}; }
  friend bool operator==(const NGram&, const NGram&) = default;
  static NGram Of(std::span<const TokenId> tokens);
};

struct NGramHash {
  std::size_t operator()(const NGram& g) const noexcept;
};

struct SpanEntry {
  NGram ngram;
  double score = 0.0;
  std::uint64_t count = 0;
};

struct SpanVocabularyOptions {
  std::uint32_t max_len = kMaxNgram;
  std::uint32_t min_count = kDefaultMinCount;
  std::size_t top_m = 10000;
  // Only collocations scoring strictly above this are kept.
  double min_score = 0.0;

  void Validate() const;
};

// Collocations of 2..5 tokens ranked by per-link joint PMI:
//
//   score(w1..wn) = [ln p(w1..wn) - sum_i ln p(wi)] / (n - 1)
//
// with p(w1..wn) = count / (number of length-n windows inside documents) and
// p(w) = unigram(w) / total tokens from the co-occurrence table.
class SpanVocabulary {
 public:
  SpanVocabulary() = default;
  explicit SpanVocabulary(std::vector<SpanEntry> entries);

  const std::vector<SpanEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::optional<double> Score(std::span<const TokenId> tokens) const;

  struct Unit {
    Position begin = 0;  // index into the eligible list
    std::uint32_t len = 1;
  };
  /// Partitions the eligible positions into masking units: matched spans
  /// (longest first, then highest score, then leftmost; no overlaps) and
  /// singletons. Spans only cover runs of consecutive positions that are all
  /// eligible. Units are ordered by position.
  std::vector<Unit> Segment(std::span<const TokenId> tokens,
                            std::span<const Position> eligible) const;

 private:
  std::vector<SpanEntry> entries_;
  std::unordered_map<NGram, double, NGramHash> index_;
  std::uint32_t max_len_ = 0;
};

/// Calls its argument once per document; may be invoked repeatedly.
using DocumentVisitor = std::function<void(const std::function<void(const Document&)>&)>;

DocumentVisitor VisitDocuments(std::span<const Document> docs);
DocumentVisitor VisitCorpus(CorpusSource& source);

/// Level-wise n-gram counting: an n-gram is only counted when both of its
/// (n-1)-gram parts reached min_count. N-grams holding special tokens are
/// ignored.
SpanVocabulary BuildSpanVocabulary(const CooccurrenceTable& counts, const DocumentVisitor& docs,
                                   const Vocabulary& vocab,
                                   const SpanVocabularyOptions& options);

/// Span-level masking: visits eligible positions in random order and masks
/// the whole unit containing each not-yet-taken one, trimming the last unit so
/// exactly MaskBudget positions are masked. A unit's chance of being picked
/// grows with its length.
std::vector<Position> PmiSpanMask(const Document& doc, std::span<const Position> eligible,
                                  double rate, const SpanVocabulary& spans,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Strategy comparison
// ---------------------------------------------------------------------------

enum class StrategyKind { kRandom, kSpan, kPmiSpan, kInformask, kInformaskApprox };

inline constexpr std::array<StrategyKind, 5> kAllStrategies = {
    StrategyKind::kRandom, StrategyKind::kSpan, StrategyKind::kPmiSpan,
    StrategyKind::kInformask, StrategyKind::kInformaskApprox};

std::string_view StrategyName(StrategyKind kind) noexcept;
/// Throws UnknownStrategy.
StrategyKind ParseStrategy(std::string_view name);

// Borrowed artifacts must outlive the strategy.
struct MaskingStrategy {
  StrategyKind kind = StrategyKind::kRandom;
  double rate = kDefaultMaskRate;
  SpanOptions span;
  MaskerOptions masker;
  const SpanVocabulary* span_vocab = nullptr;
  const PmiTable* pmi = nullptr;
  const RateTable* rates = nullptr;

  /// Throws MissingArtifact when a required table is absent.
  void Validate() const;
  /// Masked positions, sorted; empty when nothing is eligible.
  std::vector<Position> Apply(const Document& doc, std::span<const Position> eligible,
                              std::uint64_t global_seed) const;
};

struct ComparisonReport {
  std::vector<StrategyKind> strategies;
  std::vector<std::uint64_t> frequency;            // eligible occurrences per token
  std::vector<std::vector<std::uint64_t>> masked;  // [strategy][token]
  std::vector<std::uint64_t> total_masked;         // per strategy
  std::uint64_t total_eligible = 0;
  std::uint64_t documents = 0;

  double TokenRate(std::size_t strategy, TokenId t) const;
  double OverallRate(std::size_t strategy) const;
  /// Masked fraction per frequency decile; decile 0 holds the most frequent
  /// tenth of the token types that occur.
  std::vector<double> DecileCurve(std::size_t strategy) const;

  /// Columns: token, frequency, then one rate column per known strategy
  /// ("NA" for strategies not run). Rows: tokens that occur, by descending
  /// frequency then id.
  void SaveTsv(const std::filesystem::path& path, const Vocabulary& vocab) const;
  std::string SummaryJson() const;
};

ComparisonReport CompareStrategies(CorpusSource& corpus, const Vocabulary& vocab,
                                   std::span<const MaskingStrategy> strategies,
                                   std::uint64_t global_seed, std::size_t workers = 1,
                                   std::size_t batch_size = 1024);

}  // namespace pmimask
