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

#include "pmimask/pmi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "pmimask/error.hpp"

namespace pmimask {

std::vector<TokenId> TopFrequencyIds(const std::vector<std::uint64_t>& unigram,
                                     std::uint32_t k) {
  std::vector<TokenId> ids(unigram.size());
  std::iota(ids.begin(), ids.end(), TokenId{0});
  const std::size_t keep = std::min<std::size_t>(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(),
                    [&](TokenId a, TokenId b) {
                      if (unigram[a] != unigram[b]) return unigram[a] > unigram[b];
                      return a < b;
                    });
  ids.resize(keep);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void PmiTable::SetVocab(std::vector<TokenId> ids) {
  pmi_vocab_ = std::move(ids);
  in_vocab_.assign(pmi_vocab_.empty() ? 0 : pmi_vocab_.back() + std::size_t{1}, 0);
  for (TokenId id : pmi_vocab_) in_vocab_[id] = 1;
}

PmiTable PmiTable::Build(const CooccurrenceTable& counts, std::uint32_t pmi_vocab_size,
                         std::uint32_t min_count) {
  if (counts.total_pairs() == 0) {
    throw Error(ErrorCode::kEmptyCounts, "co-occurrence table holds no pairs");
  }
  if (pmi_vocab_size == 0) throw Error(ErrorCode::kInvalidArgument, "pmi_vocab_size must be >= 1");
  if (min_count == 0) throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");

  PmiTable table;
  table.min_count_ = min_count;
  table.SetVocab(TopFrequencyIds(counts.unigram(), pmi_vocab_size));
  std::uint64_t cutoff = ~std::uint64_t{0};
  for (TokenId id : table.pmi_vocab_) cutoff = std::min(cutoff, counts.unigram()[id]);
  table.cutoff_frequency_ = table.pmi_vocab_.empty() ? 0 : cutoff;

  // Slot occupancy over all counted pairs, not just the retained ones.
  std::vector<std::uint64_t> occupancy(counts.vocab_size(), 0);
  counts.pairs().ForEach([&](std::uint64_t key, std::uint64_t c) {
    occupancy[PairFirst(key)] += c;
    occupancy[PairSecond(key)] += c;
  });

  const double total = static_cast<double>(counts.total_pairs());
  counts.pairs().ForEach([&](std::uint64_t key, std::uint64_t c) {
    if (c < min_count) return;
    const TokenId a = PairFirst(key);
    const TokenId b = PairSecond(key);
    if (!table.InVocab(a) || !table.InVocab(b)) return;
    const double joint = a == b ? c / total : c / (2.0 * total);
    const double pa = occupancy[a] / (2.0 * total);
    const double pb = occupancy[b] / (2.0 * total);
    table.values_[key] = std::log(joint / (pa * pb));
  });
  return table;
}

PmiTable PmiTable::FromValues(std::vector<TokenId> pmi_vocab,
                              const std::vector<std::pair<std::uint64_t, double>>& values,
                              std::uint32_t min_count) {
  std::sort(pmi_vocab.begin(), pmi_vocab.end());
  pmi_vocab.erase(std::unique(pmi_vocab.begin(), pmi_vocab.end()), pmi_vocab.end());
  PmiTable table;
  table.min_count_ = min_count;
  table.SetVocab(std::move(pmi_vocab));
  for (const auto& [key, v] : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "PMI values must be finite");
    const std::uint64_t canonical = PairKey(PairFirst(key), PairSecond(key));
    if (!table.InVocab(PairFirst(canonical)) || !table.InVocab(PairSecond(canonical))) {
      throw Error(ErrorCode::kInvalidArgument, "PMI value for a token outside the PMI vocabulary");
    }
    table.values_[canonical] = v;
  }
  return table;
}

void PmiTable::Save(const std::filesystem::path& path) const {
  internal::BinaryWriter w(path);
  w.Magic("PMI1");
  w.Put<std::uint32_t>(kPmiVersion);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(pmi_vocab_.size()));
  w.Put<std::uint32_t>(min_count_);
  w.Put<std::uint64_t>(values_.size());
  for (TokenId id : pmi_vocab_) w.Put<std::uint32_t>(id);
  for (const auto& [key, v] : values_.Sorted()) {
    w.Put<std::uint32_t>(PairFirst(key));
    w.Put<std::uint32_t>(PairSecond(key));
    w.Put<float>(static_cast<float>(v));
  }
  w.Close();
}

PmiTable PmiTable::Load(const std::filesystem::path& path) {
  internal::BinaryReader r(path);
  r.ExpectMagic("PMI1");
  const auto version = r.Get<std::uint32_t>();
  if (version != kPmiVersion) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": unsupported PMI version " + std::to_string(version));
  }
  const auto vocab_size = r.Get<std::uint32_t>();
  PmiTable table;
  table.min_count_ = r.Get<std::uint32_t>();
  const auto n_values = r.Get<std::uint64_t>();
  std::vector<TokenId> ids(vocab_size);
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    ids[i] = r.Get<std::uint32_t>();
    if (i > 0 && ids[i] <= ids[i - 1]) {
      throw Error(ErrorCode::kFormatError, path.string() + ": PMI vocabulary not sorted");
    }
  }
  table.SetVocab(std::move(ids));
  table.values_.Reserve(n_values);
  std::uint64_t prev = 0;
  for (std::uint64_t i = 0; i < n_values; ++i) {
    const auto a = r.Get<std::uint32_t>();
    const auto b = r.Get<std::uint32_t>();
    const auto v = r.Get<float>();
    const std::uint64_t key = PairKey(a, b);
    if (a > b || (i > 0 && key <= prev) || !table.InVocab(a) || !table.InVocab(b) ||
        !std::isfinite(v)) {
      throw Error(ErrorCode::kFormatError, path.string() + ": invalid PMI record");
    }
    prev = key;
    table.values_[key] = v;
  }
  r.ExpectEnd();
  return table;
}

}  // namespace pmimask
