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

#include <algorithm>
#include <vector>

#include "doctest.h"
#include "pmimask/cooccur.hpp"
#include "pmimask/rng.hpp"
#include "support/errors.hpp"
#include "support/planted_corpus.hpp"
#include "support/temp_dir.hpp"

namespace pmimask {
namespace {

using testing::CodeOf;

constexpr TokenId a = 0, b = 1, c = 2;

CooccurrenceTable CountAll(const std::vector<std::vector<TokenId>>& docs, std::uint32_t vocab,
                           std::uint32_t window) {
  CooccurrenceTable t(vocab, window);
  for (const auto& d : docs) t.CountDocument(d);
  return t;
}

TEST_CASE("window 2 counts adjacent pairs only") {
  const auto t = CountAll({{a, b, c}}, 3, 2);
  CHECK(t.PairCount(a, b) == 1);
  CHECK(t.PairCount(b, c) == 1);
  CHECK(t.PairCount(a, c) == 0);
  CHECK(t.total_pairs() == 2);
  CHECK(t.unigram() == std::vector<std::uint64_t>{1, 1, 1});
}

TEST_CASE("window 3 reaches distance two") {
  const auto t = CountAll({{a, b, c}}, 3, 3);
  CHECK(t.PairCount(a, b) == 1);
  CHECK(t.PairCount(b, c) == 1);
  CHECK(t.PairCount(a, c) == 1);
  CHECK(t.total_pairs() == 3);
}

TEST_CASE("single token documents add no pairs") {
  const auto t = CountAll({{a}, {}}, 3, 11);
  CHECK(t.total_pairs() == 0);
  CHECK(t.unigram()[a] == 1);
  CHECK(t.total_tokens() == 1);
}

TEST_CASE("self pairs are counted and lookups are symmetric") {
  const auto t = CountAll({{a, a, b, a}}, 2, 3);
  CHECK(t.PairCount(a, a) == 2);  // (0,1) and (1,3)
  CHECK(t.PairCount(a, b) == 3);
  CHECK(t.PairCount(b, a) == 3);
  CHECK(t.total_pairs() == 5);
}

TEST_CASE("pairs never cross documents") {
  const auto t = CountAll({{a}, {b}}, 2, 11);
  CHECK(t.PairCount(a, b) == 0);
}

TEST_CASE("invalid window and token ids") {
  CHECK(CodeOf([] { CooccurrenceTable(3, 1); }) == ErrorCode::kInvalidArgument);
  CooccurrenceTable t(3, 2);
  const std::vector<TokenId> bad = {a, 3};
  CHECK(CodeOf([&] { t.CountDocument(bad); }) == ErrorCode::kInvalidToken);
  CHECK(t.total_tokens() == 0);
  CHECK(t.unigram()[a] == 0);
}

TEST_CASE("pair increments follow the closed form") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t window = 2 + static_cast<std::uint32_t>(rng.Below(12));
    const std::size_t n = rng.Below(40);
    std::vector<TokenId> doc(n);
    for (auto& t : doc) t = static_cast<TokenId>(rng.Below(6));
    CooccurrenceTable t(6, window);
    t.CountDocument(doc);
    std::uint64_t expected = 0;
    for (std::size_t i = 0; i < n; ++i) expected += std::min<std::uint64_t>(window - 1, n - 1 - i);
    CHECK(t.total_pairs() == expected);
    CHECK(ExpectedPairIncrements(n, window) == expected);
    std::uint64_t sum = 0;
    for (const auto& [key, count] : t.SortedPairs()) sum += count;
    CHECK(sum == t.total_pairs());
  }
}

TEST_CASE("sharded counts merge to the single pass table") {
  const auto docs = testing::MakeSkewedDocs(11, 20000, 30);
  const auto whole = CountAll(docs, 30, 5);
  Rng rng(3);
  std::vector<CooccurrenceTable> shards(4, CooccurrenceTable(30, 5));
  for (const auto& d : docs) shards[rng.Below(4)].CountDocument(d);
  CHECK(Merge(shards) == whole);
  std::vector<CooccurrenceTable> reversed(shards.rbegin(), shards.rend());
  CHECK(Merge(reversed) == whole);

  CooccurrenceTable empty(30, 5);
  CooccurrenceTable with_empty = whole;
  with_empty.MergeFrom(empty);
  CHECK(with_empty == whole);
}

TEST_CASE("merge rejects mismatched shapes and empty lists") {
  CooccurrenceTable x(3, 2), y(4, 2), z(3, 3);
  CHECK(CodeOf([&] { x.MergeFrom(y); }) == ErrorCode::kShardMismatch);
  CHECK(CodeOf([&] { x.MergeFrom(z); }) == ErrorCode::kShardMismatch);
  CHECK(CodeOf([] { Merge(std::span<const CooccurrenceTable>{}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("counts file round trip and canonical bytes") {
  testing::TempDir dir;
  const auto docs = testing::MakeSkewedDocs(2, 3000, 20);
  const auto t = CountAll(docs, 20, 4);
  t.Save(dir / "a.bin");
  const auto back = CooccurrenceTable::Load(dir / "a.bin");
  CHECK(back == t);
  back.Save(dir / "b.bin");
  CHECK(testing::ReadFile(dir / "a.bin") == testing::ReadFile(dir / "b.bin"));

  // Header: magic, version, vocab size, window, pair count.
  const std::string bytes = testing::ReadFile(dir / "a.bin");
  CHECK(bytes.substr(0, 4) == "CoOC");
  CHECK(bytes.size() == 4 + 4 + 4 + 4 + 8 + 8 * 20 + 16 * t.distinct_pairs());
}

TEST_CASE("corrupt counts files are format errors") {
  testing::TempDir dir;
  const auto t = CountAll({{a, b, c}}, 3, 2);
  t.Save(dir / "ok.bin");
  const std::string bytes = testing::ReadFile(dir / "ok.bin");
  testing::WriteFile(dir / "magic.bin", "XXXX" + bytes.substr(4));
  testing::WriteFile(dir / "short.bin", bytes.substr(0, bytes.size() - 3));
  testing::WriteFile(dir / "long.bin", bytes + "x");
  std::string version = bytes;
  version[4] = 9;
  testing::WriteFile(dir / "version.bin", version);
  for (const char* name : {"magic.bin", "short.bin", "long.bin", "version.bin"}) {
    CAPTURE(name);
    CHECK(CodeOf([&] { CooccurrenceTable::Load(dir / name); }) == ErrorCode::kFormatError);
  }
  CHECK(CodeOf([&] { CooccurrenceTable::Load(dir / "missing.bin"); }) == ErrorCode::kIoError);
}

}  // namespace
}  // namespace pmimask
