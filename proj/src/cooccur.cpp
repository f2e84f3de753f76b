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

#include "pmimask/cooccur.hpp"

#include <algorithm>
#include <string>

#include "binary_io.hpp"
#include "pmimask/error.hpp"

namespace pmimask {

CooccurrenceTable::CooccurrenceTable(std::uint32_t vocab_size, std::uint32_t window)
    : vocab_size_(vocab_size), window_(window), unigram_(vocab_size, 0) {
  if (window < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "window must be >= 2, got " + std::to_string(window));
  }
}

std::uint64_t CooccurrenceTable::PairCount(TokenId a, TokenId b) const noexcept {
  const std::uint64_t* c = pairs_.Find(PairKey(a, b));
  return c ? *c : 0;
}

void CooccurrenceTable::CountDocument(std::span<const TokenId> tokens) {
  for (TokenId t : tokens) {
    if (t >= vocab_size_) {
      throw Error(ErrorCode::kInvalidToken, "token id " + std::to_string(t) +
                                                " >= vocab size " +
                                                std::to_string(vocab_size_));
    }
  }
  const std::size_t n = tokens.size();
  const std::size_t reach = window_ - 1;
  for (std::size_t i = 0; i < n; ++i) {
    ++unigram_[tokens[i]];
    const std::size_t last = std::min(n - 1, i + reach);
    for (std::size_t j = i + 1; j <= last; ++j) {
      ++pairs_[PairKey(tokens[i], tokens[j])];
    }
    total_pairs_ += last - i;
  }
  total_tokens_ += n;
}

void CooccurrenceTable::MergeFrom(const CooccurrenceTable& other) {
  if (other.vocab_size_ != vocab_size_ || other.window_ != window_) {
    throw Error(ErrorCode::kShardMismatch,
                "cannot merge tables with (vocab_size, window) = (" +
                    std::to_string(vocab_size_) + ", " + std::to_string(window_) +
                    ") and (" + std::to_string(other.vocab_size_) + ", " +
                    std::to_string(other.window_) + ")");
  }
  for (std::size_t i = 0; i < unigram_.size(); ++i) unigram_[i] += other.unigram_[i];
  pairs_.Reserve(pairs_.size() + other.pairs_.size());
  other.pairs_.ForEach([&](std::uint64_t key, std::uint64_t count) { pairs_[key] += count; });
  total_pairs_ += other.total_pairs_;
  total_tokens_ += other.total_tokens_;
}

CooccurrenceTable Merge(std::span<const CooccurrenceTable> tables) {
  if (tables.empty()) throw Error(ErrorCode::kInvalidArgument, "merge of zero tables");
  CooccurrenceTable out(tables.front().vocab_size(), tables.front().window());
  for (const CooccurrenceTable& t : tables) out.MergeFrom(t);
  return out;
}

std::uint64_t ExpectedPairIncrements(std::uint64_t n, std::uint32_t window) {
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < n; ++i) total += std::min<std::uint64_t>(window - 1, n - 1 - i);
  return total;
}

bool operator==(const CooccurrenceTable& a, const CooccurrenceTable& b) {
  return a.vocab_size_ == b.vocab_size_ && a.window_ == b.window_ &&
         a.total_pairs_ == b.total_pairs_ && a.unigram_ == b.unigram_ &&
         a.pairs_.Sorted() == b.pairs_.Sorted();
}

void CooccurrenceTable::Save(const std::filesystem::path& path) const {
  internal::BinaryWriter w(path);
  w.Magic("CoOC");
  w.Put<std::uint32_t>(kCountsVersion);
  w.Put<std::uint32_t>(vocab_size_);
  w.Put<std::uint32_t>(window_);
  w.Put<std::uint64_t>(pairs_.size());
  for (std::uint64_t c : unigram_) w.Put<std::uint64_t>(c);
  for (const auto& [key, count] : pairs_.Sorted()) {
    w.Put<std::uint32_t>(PairFirst(key));
    w.Put<std::uint32_t>(PairSecond(key));
    w.Put<std::uint64_t>(count);
  }
  w.Close();
}

CooccurrenceTable CooccurrenceTable::Load(const std::filesystem::path& path) {
  internal::BinaryReader r(path);
  r.ExpectMagic("CoOC");
  const auto version = r.Get<std::uint32_t>();
  if (version != kCountsVersion) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": unsupported counts version " + std::to_string(version));
  }
  const auto vocab_size = r.Get<std::uint32_t>();
  const auto window = r.Get<std::uint32_t>();
  const auto n_pairs = r.Get<std::uint64_t>();
  if (window < 2) throw Error(ErrorCode::kFormatError, path.string() + ": window < 2");
  CooccurrenceTable t(vocab_size, window);
  for (auto& c : t.unigram_) {
    c = r.Get<std::uint64_t>();
    t.total_tokens_ += c;
  }
  t.pairs_.Reserve(n_pairs);
  std::uint64_t prev_key = 0;
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const auto a = r.Get<std::uint32_t>();
    const auto b = r.Get<std::uint32_t>();
    const auto count = r.Get<std::uint64_t>();
    if (a > b || b >= vocab_size) {
      throw Error(ErrorCode::kFormatError, path.string() + ": non-canonical pair record");
    }
    const std::uint64_t key = PairKey(a, b);
    if (i > 0 && key <= prev_key) {
      throw Error(ErrorCode::kFormatError, path.string() + ": pair records not sorted");
    }
    prev_key = key;
    t.pairs_[key] = count;
    t.total_pairs_ += count;
  }
  r.ExpectEnd();
  return t;
}

}  // namespace pmimask
