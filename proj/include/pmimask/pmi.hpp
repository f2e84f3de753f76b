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
#include <vector>

#include "pmimask/cooccur.hpp"
#include "pmimask/pair_map.hpp"
#include "pmimask/types.hpp"

namespace pmimask {

inline constexpr std::uint32_t kPmiVersion = 1;
inline constexpr std::uint32_t kDefaultPmiVocabSize = 100000;
inline constexpr std::uint32_t kDefaultMinCount = 5;

// Sparse symmetric PMI over the most frequent tokens.
//
// Probabilities live on the space of ordered co-occurrence pairs: each counted
// unordered pair (a, b) contributes both (a, b) and (b, a). With T the number
// of counted pairs and occ(w) the number of pair slots holding w,
//
//   p(w)    = occ(w) / 2T
//   p(a, b) = count(a, b) / 2T   for a != b
//   p(a, a) = count(a, a) / T
//
// so marginals sum to one and independent tokens score zero in expectation.
class PmiTable {
 public:
  PmiTable() = default;

  /// Throws EmptyCounts when counts.total_pairs() == 0 and InvalidArgument
  /// for pmi_vocab_size == 0 or min_count == 0.
  static PmiTable Build(const CooccurrenceTable& counts, std::uint32_t pmi_vocab_size,
                        std::uint32_t min_count);

  double Lookup(TokenId a, TokenId b) const noexcept {
    const double* v = values_.Find(PairKey(a, b));
    return v ? *v : default_value_;
  }
  bool Contains(TokenId a, TokenId b) const noexcept {
    return values_.Find(PairKey(a, b)) != nullptr;
  }
  bool InVocab(TokenId id) const noexcept {
    return id < in_vocab_.size() && in_vocab_[id];
  }

  const std::vector<TokenId>& pmi_vocab() const noexcept { return pmi_vocab_; }
  std::uint32_t min_count() const noexcept { return min_count_; }
  double default_value() const noexcept { return default_value_; }
  std::size_t value_count() const noexcept { return values_.size(); }
  /// Unigram count of the least frequent token admitted to the PMI vocabulary
  /// (0 for tables read from disk).
  std::uint64_t cutoff_frequency() const noexcept { return cutoff_frequency_; }

  std::vector<std::pair<std::uint64_t, double>> SortedValues() const {
    return values_.Sorted();
  }

  /// Values are narrowed to f32 on disk.
  void Save(const std::filesystem::path& path) const;
  static PmiTable Load(const std::filesystem::path& path);

  /// Table with explicit values, for tests and external tooling.
  static PmiTable FromValues(std::vector<TokenId> pmi_vocab,
                             const std::vector<std::pair<std::uint64_t, double>>& values,
                             std::uint32_t min_count = 1);

 private:
  void SetVocab(std::vector<TokenId> ids);

  std::vector<TokenId> pmi_vocab_;
  std::vector<char> in_vocab_;
  PairMap<double> values_;
  std::uint32_t min_count_ = kDefaultMinCount;
  double default_value_ = 0.0;
  std::uint64_t cutoff_frequency_ = 0;
};

/// Ids of the `k` most frequent tokens, ties broken by smaller id, sorted
/// ascending.
std::vector<TokenId> TopFrequencyIds(const std::vector<std::uint64_t>& unigram,
                                     std::uint32_t k);

}  // namespace pmimask
