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
#include <utility>
#include <vector>

#include "pmimask/pair_map.hpp"
#include "pmimask/types.hpp"

namespace pmimask {

inline constexpr std::uint32_t kCountsVersion = 1;

// Unigram counts plus symmetric skip-gram pair counts. A window of W means
// positions i < j co-occur when j - i <= W - 1; each unordered position pair
// is counted once, and pairs never cross documents.
class CooccurrenceTable {
 public:
  CooccurrenceTable(std::uint32_t vocab_size, std::uint32_t window);

  std::uint32_t vocab_size() const noexcept { return vocab_size_; }
  std::uint32_t window() const noexcept { return window_; }
  std::uint64_t total_pairs() const noexcept { return total_pairs_; }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::size_t distinct_pairs() const noexcept { return pairs_.size(); }

  const std::vector<std::uint64_t>& unigram() const noexcept { return unigram_; }
  std::uint64_t PairCount(TokenId a, TokenId b) const noexcept;

  /// Adds one document. Throws InvalidToken for ids >= vocab_size; the table is
  /// left unchanged in that case.
  void CountDocument(std::span<const TokenId> tokens);

  /// Entrywise sum into *this. Throws ShardMismatch on differing shape.
  void MergeFrom(const CooccurrenceTable& other);

  /// (key, count) sorted by canonical key.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> SortedPairs() const {
    return pairs_.Sorted();
  }
  const PairMap<std::uint64_t>& pairs() const noexcept { return pairs_; }

  void Save(const std::filesystem::path& path) const;
  static CooccurrenceTable Load(const std::filesystem::path& path);

  friend bool operator==(const CooccurrenceTable& a, const CooccurrenceTable& b);

 private:
  std::uint32_t vocab_size_;
  std::uint32_t window_;
  std::vector<std::uint64_t> unigram_;
  PairMap<std::uint64_t> pairs_;
  std::uint64_t total_pairs_ = 0;
  std::uint64_t total_tokens_ = 0;
};

/// Merges shards in order. Throws ShardMismatch if shapes differ and
/// InvalidArgument for an empty list.
CooccurrenceTable Merge(std::span<const CooccurrenceTable> tables);

/// Number of pair increments for a document of length n under `window`.
std::uint64_t ExpectedPairIncrements(std::uint64_t n, std::uint32_t window);

}  // namespace pmimask
