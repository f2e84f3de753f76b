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

// Synthetic corpora with known structure.
//
// A planted corpus mixes four token classes. Fillers are drawn uniformly in
// every document, so they carry no information about their neighbours. Each
// document has one topic; its content words and its entity come only from that
// topic. A collocation is a fixed two-token sequence whose members never occur
// apart.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pmimask/corpus.hpp"
#include "pmimask/rng.hpp"
#include "pmimask/types.hpp"

namespace pmimask::testing {

struct PlantedOptions {
  std::size_t target_tokens = 1'000'000;
  std::uint32_t topics = 20;
  std::uint32_t content_per_topic = 10;
  std::uint32_t fillers = 10;
  // Event weights; a collocation event emits two tokens.
  double w_filler = 0.50;
  double w_content = 0.35;
  double w_entity = 0.05;
  double w_collocation = 0.025;
  std::uint32_t min_len = 40;
  std::uint32_t max_len = 120;
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  Vocabulary vocab;
  std::vector<std::string> tokens;  // vocabulary body, id order
  std::vector<Document> docs;
  std::vector<TokenId> fillers;
  std::vector<TokenId> content;
  std::vector<TokenId> entities;
  std::vector<TokenId> collocation_members;
  std::size_t total_tokens = 0;

  void WriteVocab(const std::filesystem::path& path) const {
    std::ofstream out(path);
    out << "#special [PAD] pad\n#special [UNK] unk\n#special [MASK] mask\n";
    for (const auto& t : tokens) out << t << '\n';
  }

  void WriteCorpus(const std::filesystem::path& path) const {
    std::ofstream out(path);
    for (const auto& d : docs) {
      for (std::size_t i = 0; i < d.tokens.size(); ++i) {
        if (i) out << ' ';
        out << tokens[d.tokens[i]];
      }
      out << '\n';
    }
  }
};

inline PlantedCorpus MakePlantedCorpus(const PlantedOptions& o = {}) {
  PlantedCorpus c;
  c.tokens = {"[PAD]", "[UNK]", "[MASK]"};
  auto add = [&](const std::string& name) {
    c.tokens.push_back(name);
    return static_cast<TokenId>(c.tokens.size() - 1);
  };
  for (std::uint32_t f = 0; f < o.fillers; ++f) c.fillers.push_back(add("f" + std::to_string(f)));
  std::vector<std::vector<TokenId>> topic_words(o.topics);
  std::vector<TokenId> entity(o.topics), first(o.topics), second(o.topics);
  for (std::uint32_t t = 0; t < o.topics; ++t) {
    const std::string tag = "t" + std::to_string(t);
    for (std::uint32_t w = 0; w < o.content_per_topic; ++w) {
      topic_words[t].push_back(add(tag + "w" + std::to_string(w)));
      c.content.push_back(topic_words[t].back());
    }
    entity[t] = add(tag + "z");
    first[t] = add(tag + "x");
    second[t] = add(tag + "y");
    c.entities.push_back(entity[t]);
    c.collocation_members.push_back(first[t]);
    c.collocation_members.push_back(second[t]);
  }
  const std::vector<std::string> specials = {"[PAD] pad", "[UNK] unk", "[MASK] mask"};
  c.vocab = Vocabulary::FromTokens(c.tokens, specials);

  const double total_w = o.w_filler + o.w_content + o.w_entity + o.w_collocation;
  Rng rng(o.seed);
  DocId id = 0;
  while (c.total_tokens < o.target_tokens) {
    const std::uint32_t t = static_cast<std::uint32_t>(rng.Below(o.topics));
    const std::uint32_t len =
        o.min_len + static_cast<std::uint32_t>(rng.Below(o.max_len - o.min_len + 1));
    Document d{id++, {}};
    while (d.tokens.size() < len) {
      const double u = rng.Uniform() * total_w;
      if (u < o.w_filler) {
        d.tokens.push_back(c.fillers[rng.Below(o.fillers)]);
      } else if (u < o.w_filler + o.w_content) {
        d.tokens.push_back(topic_words[t][rng.Below(o.content_per_topic)]);
      } else if (u < o.w_filler + o.w_content + o.w_entity) {
        d.tokens.push_back(entity[t]);
      } else {
        d.tokens.push_back(first[t]);
        d.tokens.push_back(second[t]);
      }
    }
    c.total_tokens += d.tokens.size();
    c.docs.push_back(std::move(d));
  }
  return c;
}

// Documents over ids [0, vocab_size) with a skewed unigram distribution, so
// that frequency cut-offs and count thresholds both bite.
inline std::vector<std::vector<TokenId>> MakeSkewedDocs(std::uint64_t seed, std::size_t n_tokens,
                                                        std::uint32_t vocab_size) {
  Rng rng(seed);
  std::vector<double> cdf(vocab_size);
  double acc = 0;
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    acc += 1.0 / (1.0 + i);
    cdf[i] = acc;
  }
  std::vector<std::vector<TokenId>> docs;
  std::size_t produced = 0;
  while (produced < n_tokens) {
    const std::size_t len = std::min<std::size_t>(n_tokens - produced, rng.Below(60));
    std::vector<TokenId> d;
    for (std::size_t i = 0; i < len; ++i) {
      const double u = rng.Uniform() * acc;
      d.push_back(static_cast<TokenId>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()));
    }
    produced += std::max<std::size_t>(len, 1);
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace pmimask::testing
