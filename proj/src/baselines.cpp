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

#include "pmimask/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "json.hpp"
#include "pmimask/error.hpp"
#include "pmimask/parallel.hpp"

namespace pmimask {

std::vector<Position> RandomMask(std::span<const Position> eligible, double rate,
                                 std::uint64_t seed) {
  const std::size_t k = MaskBudget(eligible.size(), rate);
  std::vector<Position> pool(eligible.begin(), eligible.end());
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.Below(pool.size() - i)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void SpanOptions::Validate() const {
  if (!(p_geo > 0.0 && p_geo < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "geometric p must lie in (0, 1)");
  }
  if (max_span < 1) throw Error(ErrorCode::kInvalidArgument, "max_span must be >= 1");
}

std::vector<double> TruncatedGeometricPmf(double p, std::uint32_t max_span) {
  std::vector<double> pmf(max_span);
  double mass = 0.0;
  for (std::uint32_t l = 1; l <= max_span; ++l) {
    pmf[l - 1] = p * std::pow(1.0 - p, l - 1);
    mass += pmf[l - 1];
  }
  for (double& v : pmf) v /= mass;
  return pmf;
}

SpanLengthSampler::SpanLengthSampler(const SpanOptions& options) {
  options.Validate();
  const auto pmf = TruncatedGeometricPmf(options.p_geo, options.max_span);
  cdf_.resize(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf_.begin());
  cdf_.back() = 1.0;
}

std::uint32_t SpanLengthSampler::operator()(Rng& rng) const {
  const double u = rng.Uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                             cdf_.size() - 1)) + 1;
}

std::vector<Position> SpanMask(std::span<const Position> eligible, double rate,
                               const SpanOptions& options, std::uint64_t seed) {
  const SpanLengthSampler sample_length(options);
  const std::size_t n = eligible.size();
  const std::size_t k = MaskBudget(n, rate);
  std::vector<char> taken(n, 0);
  std::size_t masked = 0;
  Rng rng(seed);
  while (masked < k) {
    const std::uint32_t len = sample_length(rng);
    const std::size_t start = rng.Below(n);
    const std::size_t end = std::min(n, start + len);
    for (std::size_t e = start; e < end && masked < k; ++e) {
      if (taken[e]) continue;
      taken[e] = 1;
      ++masked;
    }
  }
  std::vector<Position> out;
  out.reserve(k);
  for (std::size_t e = 0; e < n; ++e) {
    if (taken[e]) out.push_back(eligible[e]);
  }
  return out;
}

NGram NGram::Of(std::span<const TokenId> tokens) {
  NGram g;
  g.len = static_cast<std::uint8_t>(tokens.size());
  std::copy(tokens.begin(), tokens.end(), g.ids.begin());
  return g;
}

std::size_t NGramHash::operator()(const NGram& g) const noexcept {
  std::uint64_t h = SplitMix64(g.len);
  for (std::uint8_t i = 0; i < g.len; ++i) h = SplitMix64(h ^ g.ids[i]);
  return static_cast<std::size_t>(h);
}

void SpanVocabularyOptions::Validate() const {
  if (max_len < 2 || max_len > kMaxNgram) {
    throw Error(ErrorCode::kInvalidArgument, "span max_len must lie in [2, 5]");
  }
  if (min_count < 1) throw Error(ErrorCode::kInvalidArgument, "span min_count must be >= 1");
}

SpanVocabulary::SpanVocabulary(std::vector<SpanEntry> entries) : entries_(std::move(entries)) {
  for (const SpanEntry& e : entries_) {
    if (e.ngram.len < 2 || e.ngram.len > kMaxNgram || !std::isfinite(e.score)) {
      throw Error(ErrorCode::kInvalidArgument, "span entries need 2..5 tokens and a finite score");
    }
    index_.emplace(e.ngram, e.score);
    max_len_ = std::max<std::uint32_t>(max_len_, e.ngram.len);
  }
}

std::optional<double> SpanVocabulary::Score(std::span<const TokenId> tokens) const {
  if (tokens.size() < 2 || tokens.size() > kMaxNgram) return std::nullopt;
  const auto it = index_.find(NGram::Of(tokens));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<SpanVocabulary::Unit> SpanVocabulary::Segment(
    std::span<const TokenId> tokens, std::span<const Position> eligible) const {
  struct Match {
    std::size_t begin;
    std::uint32_t len;
    double score;
  };
  const std::size_t n = eligible.size();
  std::vector<Match> matches;
  std::array<TokenId, kMaxNgram> buf{};
  for (std::size_t e = 0; e < n; ++e) {
    for (std::uint32_t len = std::min<std::uint32_t>(max_len_, static_cast<std::uint32_t>(n - e));
         len >= 2; --len) {
      if (eligible[e + len - 1] - eligible[e] != len - 1) continue;
      for (std::uint32_t i = 0; i < len; ++i) buf[i] = tokens[eligible[e + i]];
      if (auto s = Score({buf.data(), len})) matches.push_back({e, len, *s});
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    if (a.len != b.len) return a.len > b.len;
    if (a.score != b.score) return a.score > b.score;
    return a.begin < b.begin;
  });
  std::vector<std::uint32_t> span_len(n, 0);
  std::vector<char> covered(n, 0);
  for (const Match& m : matches) {
    bool free = true;
    for (std::size_t i = m.begin; i < m.begin + m.len && free; ++i) free = !covered[i];
    if (!free) continue;
    for (std::size_t i = m.begin; i < m.begin + m.len; ++i) covered[i] = 1;
    span_len[m.begin] = m.len;
  }
  std::vector<Unit> units;
  for (std::size_t e = 0; e < n;) {
    const std::uint32_t len = span_len[e] ? span_len[e] : 1;
    units.push_back({static_cast<Position>(e), len});
    e += len;
  }
  return units;
}

DocumentVisitor VisitDocuments(std::span<const Document> docs) {
  return [docs](const std::function<void(const Document&)>& fn) {
    for (const Document& d : docs) fn(d);
  };
}

DocumentVisitor VisitCorpus(CorpusSource& source) {
  return [&source](const std::function<void(const Document&)>& fn) {
    source.Rewind();
    std::vector<Document> batch;
    while (source.NextBatch(batch, 4096)) {
      for (const Document& d : batch) fn(d);
    }
  };
}

SpanVocabulary BuildSpanVocabulary(const CooccurrenceTable& counts, const DocumentVisitor& docs,
                                   const Vocabulary& vocab,
                                   const SpanVocabularyOptions& options) {
  options.Validate();
  using CountMap = std::unordered_map<NGram, std::uint64_t, NGramHash>;
  const double total_tokens = static_cast<double>(counts.total_tokens());
  std::vector<SpanEntry> entries;
  CountMap previous;  // frequent (n-1)-grams; empty at n = 2
  for (std::uint32_t n = 2; n <= options.max_len; ++n) {
    CountMap current;
    std::uint64_t windows = 0;
    docs([&](const Document& doc) {
      const auto& t = doc.tokens;
      if (t.size() < n) return;
      windows += t.size() - n + 1;
      for (std::size_t i = 0; i + n <= t.size(); ++i) {
        const std::span<const TokenId> gram(t.data() + i, n);
        bool ok = true;
        for (TokenId id : gram) {
          if (id >= counts.vocab_size() || vocab.IsSpecial(id) || counts.unigram()[id] == 0) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        if (n > 2 && (!previous.contains(NGram::Of(gram.first(n - 1))) ||
                      !previous.contains(NGram::Of(gram.last(n - 1))))) {
          continue;
        }
        ++current[NGram::Of(gram)];
      }
    });
    std::erase_if(current, [&](const auto& kv) { return kv.second < options.min_count; });
    for (const auto& [gram, c] : current) {
      double log_p = std::log(static_cast<double>(c) / static_cast<double>(windows));
      for (TokenId id : gram.tokens()) {
        log_p -= std::log(static_cast<double>(counts.unigram()[id]) / total_tokens);
      }
      const double score = log_p / static_cast<double>(n - 1);
      if (score > options.min_score) entries.push_back({gram, score, c});
    }
    if (current.empty()) break;
    previous = std::move(current);
  }
  std::sort(entries.begin(), entries.end(), [](const SpanEntry& a, const SpanEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.ngram.len != b.ngram.len) return a.ngram.len > b.ngram.len;
    return std::lexicographical_compare(a.ngram.ids.begin(), a.ngram.ids.begin() + a.ngram.len,
                                        b.ngram.ids.begin(), b.ngram.ids.begin() + b.ngram.len);
  });
  if (entries.size() > options.top_m) entries.resize(options.top_m);
  return SpanVocabulary(std::move(entries));
}

std::vector<Position> PmiSpanMask(const Document& doc, std::span<const Position> eligible,
                                  double rate, const SpanVocabulary& spans,
                                  std::uint64_t seed) {
  const std::size_t n = eligible.size();
  const std::size_t k = MaskBudget(n, rate);
  if (k == 0) return {};
  const auto units = spans.Segment(doc.tokens, eligible);
  std::vector<std::uint32_t> unit_of(n);
  for (std::uint32_t u = 0; u < units.size(); ++u) {
    for (std::uint32_t i = 0; i < units[u].len; ++i) unit_of[units[u].begin + i] = u;
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);
  std::vector<char> unit_taken(units.size(), 0);
  std::vector<char> masked(n, 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n && count < k; ++i) {
    std::swap(order[i], order[i + rng.Below(n - i)]);
    const std::uint32_t u = unit_of[order[i]];
    if (unit_taken[u]) continue;
    unit_taken[u] = 1;
    for (std::uint32_t j = 0; j < units[u].len && count < k; ++j) {
      masked[units[u].begin + j] = 1;
      ++count;
    }
  }
  std::vector<Position> out;
  out.reserve(k);
  for (std::size_t e = 0; e < n; ++e) {
    if (masked[e]) out.push_back(eligible[e]);
  }
  return out;
}

std::string_view StrategyName(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kSpan: return "span";
    case StrategyKind::kPmiSpan: return "pmi_span";
    case StrategyKind::kInformask: return "informask";
    case StrategyKind::kInformaskApprox: return "informask_approx";
  }
  return "unknown";
}

StrategyKind ParseStrategy(std::string_view name) {
  for (StrategyKind k : kAllStrategies) {
    if (StrategyName(k) == name) return k;
  }
  throw Error(ErrorCode::kUnknownStrategy, "unknown strategy '" + std::string(name) + "'");
}

void MaskingStrategy::Validate() const {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "masking rate must lie in (0, 1)");
  }
  switch (kind) {
    case StrategyKind::kRandom: break;
    case StrategyKind::kSpan: span.Validate(); break;
    case StrategyKind::kPmiSpan:
      if (span_vocab == nullptr) {
        throw Error(ErrorCode::kMissingArtifact, "pmi_span needs a span vocabulary");
      }
      break;
    case StrategyKind::kInformask:
      if (pmi == nullptr) throw Error(ErrorCode::kMissingArtifact, "informask needs a PMI table");
      masker.Validate();
      break;
    case StrategyKind::kInformaskApprox:
      if (rates == nullptr) {
        throw Error(ErrorCode::kMissingArtifact, "informask_approx needs a rate table");
      }
      break;
  }
}

std::vector<Position> MaskingStrategy::Apply(const Document& doc,
                                             std::span<const Position> eligible,
                                             std::uint64_t global_seed) const {
  const DocId id = doc.doc_id;
  switch (kind) {
    case StrategyKind::kRandom:
      return RandomMask(eligible, rate, DeriveSeed(global_seed, id, Stream::kRandom));
    case StrategyKind::kSpan:
      return SpanMask(eligible, rate, span, DeriveSeed(global_seed, id, Stream::kSpan));
    case StrategyKind::kPmiSpan:
      return PmiSpanMask(doc, eligible, rate, *span_vocab,
                         DeriveSeed(global_seed, id, Stream::kPmiSpan));
    case StrategyKind::kInformask: {
      MaskerOptions opts = masker;
      opts.rate = rate;
      auto decision = ChooseMasking(doc, eligible, *pmi, opts, global_seed);
      return decision ? std::move(decision->chosen.positions) : std::vector<Position>{};
    }
    case StrategyKind::kInformaskApprox:
      return ApproximateMask(doc, eligible, *rates,
                             DeriveSeed(global_seed, id, Stream::kApproximate));
  }
  return {};
}

double ComparisonReport::TokenRate(std::size_t strategy, TokenId t) const {
  if (frequency[t] == 0) return 0.0;
  return static_cast<double>(masked[strategy][t]) / static_cast<double>(frequency[t]);
}

double ComparisonReport::OverallRate(std::size_t strategy) const {
  if (total_eligible == 0) return 0.0;
  return static_cast<double>(total_masked[strategy]) / static_cast<double>(total_eligible);
}

namespace {

std::vector<TokenId> TokensByFrequency(const std::vector<std::uint64_t>& frequency) {
  std::vector<TokenId> ids;
  for (TokenId t = 0; t < frequency.size(); ++t) {
    if (frequency[t] > 0) ids.push_back(t);
  }
  std::sort(ids.begin(), ids.end(), [&](TokenId a, TokenId b) {
    if (frequency[a] != frequency[b]) return frequency[a] > frequency[b];
    return a < b;
  });
  return ids;
}

std::string FormatRate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<double> ComparisonReport::DecileCurve(std::size_t strategy) const {
  const auto ids = TokensByFrequency(frequency);
  std::vector<double> masked_sum(10, 0.0), occ_sum(10, 0.0);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const std::size_t d = r * 10 / ids.size();
    masked_sum[d] += static_cast<double>(masked[strategy][ids[r]]);
    occ_sum[d] += static_cast<double>(frequency[ids[r]]);
  }
  std::vector<double> curve(10, 0.0);
  for (std::size_t d = 0; d < 10; ++d) curve[d] = occ_sum[d] > 0 ? masked_sum[d] / occ_sum[d] : 0.0;
  return curve;
}

void ComparisonReport::SaveTsv(const std::filesystem::path& path, const Vocabulary& vocab) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  std::vector<int> column(kAllStrategies.size(), -1);
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    column[static_cast<std::size_t>(strategies[s])] = static_cast<int>(s);
  }
  out << "token\tfrequency";
  for (StrategyKind k : kAllStrategies) out << "\trate_" << StrategyName(k);
  out << '\n';
  for (TokenId t : TokensByFrequency(frequency)) {
    out << vocab.Token(t) << '\t' << frequency[t];
    for (std::size_t c = 0; c < kAllStrategies.size(); ++c) {
      out << '\t' << (column[c] < 0 ? std::string("NA") : FormatRate(TokenRate(column[c], t)));
    }
    out << '\n';
  }
  if (!out.flush()) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string ComparisonReport::SummaryJson() const {
  nlohmann::ordered_json j;
  j["documents"] = documents;
  j["eligible_tokens"] = total_eligible;
  auto& list = j["strategies"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    nlohmann::ordered_json e;
    e["name"] = StrategyName(strategies[s]);
    e["masked_tokens"] = total_masked[s];
    e["overall_rate"] = OverallRate(s);
    e["decile_rates"] = DecileCurve(s);
    list.push_back(std::move(e));
  }
  return j.dump(2);
}

ComparisonReport CompareStrategies(CorpusSource& corpus, const Vocabulary& vocab,
                                   std::span<const MaskingStrategy> strategies,
                                   std::uint64_t global_seed, std::size_t workers,
                                   std::size_t batch_size) {
  for (const MaskingStrategy& s : strategies) s.Validate();
  const std::size_t v = vocab.size();
  const std::size_t ns = strategies.size();
  ComparisonReport report;
  for (const MaskingStrategy& s : strategies) report.strategies.push_back(s.kind);
  report.frequency.assign(v, 0);
  report.masked.assign(ns, std::vector<std::uint64_t>(v, 0));
  report.total_masked.assign(ns, 0);

  workers = std::max<std::size_t>(1, workers);
  struct Shard {
    std::vector<std::uint64_t> frequency;
    std::vector<std::vector<std::uint64_t>> masked;
  };
  std::vector<Shard> shards(workers, Shard{std::vector<std::uint64_t>(v, 0),
                                           std::vector<std::vector<std::uint64_t>>(
                                               ns, std::vector<std::uint64_t>(v, 0))});
  corpus.Rewind();
  std::vector<Document> batch;
  while (corpus.NextBatch(batch, batch_size)) {
    report.documents += batch.size();
    ParallelChunks(batch.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
      Shard& shard = shards[w];
      for (std::size_t i = begin; i < end; ++i) {
        const Document& doc = batch[i];
        const auto eligible = EligiblePositions(doc, vocab);
        for (Position p : eligible) ++shard.frequency[doc.tokens[p]];
        for (std::size_t s = 0; s < ns; ++s) {
          for (Position p : strategies[s].Apply(doc, eligible, global_seed)) {
            ++shard.masked[s][doc.tokens[p]];
          }
        }
      }
    });
  }
  for (const Shard& shard : shards) {
    for (std::size_t t = 0; t < v; ++t) report.frequency[t] += shard.frequency[t];
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t t = 0; t < v; ++t) report.masked[s][t] += shard.masked[s][t];
    }
  }
  for (std::size_t t = 0; t < v; ++t) report.total_eligible += report.frequency[t];
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < v; ++t) report.total_masked[s] += report.masked[s][t];
  }
  return report;
}

}  // namespace pmimask
