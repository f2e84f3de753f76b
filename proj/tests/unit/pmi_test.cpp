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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "pmimask/cooccur.hpp"
#include "pmimask/pmi.hpp"
#include "pmimask/rng.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"
#include "support/planted_corpus.hpp"
#include "support/temp_dir.hpp"

namespace pmimask {
namespace {

using testing::CodeOf;

CooccurrenceTable CountAll(const std::vector<std::vector<TokenId>>& docs, std::uint32_t vocab,
                           std::uint32_t window) {
  CooccurrenceTable t(vocab, window);
  for (const auto& d : docs) t.CountDocument(d);
  return t;
}

TEST_CASE("two documents sharing one token") {
  // "a b" and "a c": a fills two of the four ordered slots.
  const auto counts = CountAll({{0, 1}, {0, 2}}, 3, 2);
  const auto pmi = PmiTable::Build(counts, 100, 1);
  CHECK(pmi.Lookup(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(pmi.Lookup(0, 2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(pmi.Lookup(1, 2) == 0.0);
  CHECK_FALSE(pmi.Contains(1, 2));
}

TEST_CASE("stored values match the ordered-pair oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::uint32_t vocab = 10;
    const std::uint32_t window = trial % 2 ? 3 : 11;
    const std::uint32_t k = 6 + trial % 5;
    const std::uint32_t min_count = 1 + trial % 3;
    std::vector<std::vector<TokenId>> docs(200);
    for (auto& d : docs) {
      d.resize(rng.Below(30));
      for (auto& t : d) t = static_cast<TokenId>(rng.Below(vocab));
    }
    const auto pmi = PmiTable::Build(CountAll(docs, vocab, window), k, min_count);
    const auto oracle = testing::OraclePmi(docs, vocab, window, k, min_count);
    CHECK(pmi.value_count() == oracle.size());
    for (const auto& [p, v] : oracle) {
      CHECK(pmi.Contains(p.first, p.second));
      CHECK(std::abs(pmi.Lookup(p.first, p.second) - v) < 1e-9);
    }
  }
}

TEST_CASE("lookup is symmetric and defaults outside the table") {
  const auto docs = testing::MakeSkewedDocs(4, 5000, 25);
  const auto pmi = PmiTable::Build(CountAll(docs, 25, 5), 15, 2);
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto x = static_cast<TokenId>(rng.Below(40));
    const auto y = static_cast<TokenId>(rng.Below(40));
    CHECK(pmi.Lookup(x, y) == pmi.Lookup(y, x));
  }
  CHECK(pmi.Lookup(1000, 0) == pmi.default_value());
  CHECK(pmi.default_value() == 0.0);
}

TEST_CASE("pmi vocabulary is the top-K by frequency with ties to smaller ids") {
  const std::vector<std::uint64_t> unigram = {5, 9, 5, 0, 9, 1};
  CHECK(TopFrequencyIds(unigram, 3) == std::vector<TokenId>{0, 1, 4});
  CHECK(TopFrequencyIds(unigram, 4) == std::vector<TokenId>{0, 1, 2, 4});
  CHECK(TopFrequencyIds(unigram, 100).size() == unigram.size());
}

TEST_CASE("values exist only above min_count and inside the vocabulary") {
  const auto docs = testing::MakeSkewedDocs(6, 8000, 30);
  const auto counts = CountAll(docs, 30, 4);
  const auto pmi = PmiTable::Build(counts, 12, 4);
  for (const auto& [key, v] : pmi.SortedValues()) {
    const TokenId x = PairFirst(key), y = PairSecond(key);
    CHECK(pmi.InVocab(x));
    CHECK(pmi.InVocab(y));
    CHECK(counts.PairCount(x, y) >= 4);
    CHECK(std::isfinite(v));
  }
  std::size_t eligible = 0;
  for (const auto& [key, cnt] : counts.SortedPairs()) {
    eligible += cnt >= 4 && pmi.InVocab(PairFirst(key)) && pmi.InVocab(PairSecond(key));
  }
  CHECK(pmi.value_count() == eligible);
}

TEST_CASE("independent tokens score near zero") {
  Rng rng(99);
  CooccurrenceTable counts(8, 11);
  std::vector<TokenId> doc;
  for (int d = 0; d < 10000; ++d) {
    doc.resize(100);
    for (auto& t : doc) t = static_cast<TokenId>(rng.Below(8));
    counts.CountDocument(doc);
  }
  const auto pmi = PmiTable::Build(counts, 8, 5);
  double sum = 0;
  for (const auto& [key, v] : pmi.SortedValues()) sum += std::abs(v);
  CHECK(pmi.value_count() == 36);
  CHECK(sum / static_cast<double>(pmi.value_count()) < 0.05);
}

TEST_CASE("an exclusive pair has the largest value") {
  Rng rng(12);
  std::vector<std::vector<TokenId>> docs;
  for (int i = 0; i < 300; ++i) docs.push_back({0, 1});
  for (int i = 0; i < 300; ++i) {
    std::vector<TokenId> d(6);
    for (auto& t : d) t = static_cast<TokenId>(2 + rng.Below(4));
    docs.push_back(d);
  }
  const auto pmi = PmiTable::Build(CountAll(docs, 6, 3), 6, 1);
  const double top = pmi.Lookup(0, 1);
  for (const auto& [key, v] : pmi.SortedValues()) {
    if (key != PairKey(0, 1)) CHECK(v < top);
  }
}

TEST_CASE("build preconditions") {
  CooccurrenceTable empty(4, 3);
  CHECK(CodeOf([&] { PmiTable::Build(empty, 4, 1); }) == ErrorCode::kEmptyCounts);
  const auto counts = CountAll({{0, 1}}, 2, 2);
  CHECK(CodeOf([&] { PmiTable::Build(counts, 0, 1); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { PmiTable::Build(counts, 2, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("pmi file round trip stores single precision") {
  testing::TempDir dir;
  const auto docs = testing::MakeSkewedDocs(9, 6000, 20);
  const auto pmi = PmiTable::Build(CountAll(docs, 20, 5), 15, 2);
  pmi.Save(dir / "p.bin");
  const auto back = PmiTable::Load(dir / "p.bin");
  CHECK(back.pmi_vocab() == pmi.pmi_vocab());
  CHECK(back.min_count() == pmi.min_count());
  REQUIRE(back.value_count() == pmi.value_count());
  for (const auto& [key, v] : pmi.SortedValues()) {
    CHECK(back.Lookup(PairFirst(key), PairSecond(key)) ==
          static_cast<double>(static_cast<float>(v)));
  }
  back.Save(dir / "q.bin");
  CHECK(testing::ReadFile(dir / "p.bin") == testing::ReadFile(dir / "q.bin"));
  // A second build from the same counts writes the same bytes.
  PmiTable::Build(CountAll(docs, 20, 5), 15, 2).Save(dir / "r.bin");
  CHECK(testing::ReadFile(dir / "p.bin") == testing::ReadFile(dir / "r.bin"));
}

TEST_CASE("pmi files with wrong magic or version are rejected") {
  testing::TempDir dir;
  PmiTable::Build(CountAll({{0, 1, 0}}, 2, 2), 2, 1).Save(dir / "p.bin");
  std::string bytes = testing::ReadFile(dir / "p.bin");
  testing::WriteFile(dir / "magic.bin", "CoOC" + bytes.substr(4));
  bytes[4] = 2;
  testing::WriteFile(dir / "version.bin", bytes);
  CHECK(CodeOf([&] { PmiTable::Load(dir / "magic.bin"); }) == ErrorCode::kFormatError);
  CHECK(CodeOf([&] { PmiTable::Load(dir / "version.bin"); }) == ErrorCode::kFormatError);
}

}  // namespace
}  // namespace pmimask
