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

#include "pmimask/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "pmimask/error.hpp"
#include "pmimask/rng.hpp"

namespace pmimask {

RateTable::RateTable(std::uint32_t vocab_size, double target_rate)
    : occurrences_(vocab_size, 0), masked_(vocab_size, 0), target_rate_(target_rate) {
  if (!(target_rate >= 0.0 && target_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target rate must lie in [0, 1]");
  }
}

double RateTable::Rate(TokenId t) const noexcept {
  if (t >= occurrences_.size() || occurrences_[t] == 0) return target_rate_;
  const double r = static_cast<double>(masked_[t]) / static_cast<double>(occurrences_[t]);
  return std::min(1.0, r * scale_);
}

double RateTable::OverallRate() const noexcept {
  double masked = 0.0;
  double total = 0.0;
  for (TokenId t = 0; t < occurrences_.size(); ++t) {
    if (occurrences_[t] == 0) continue;
    masked += Rate(t) * static_cast<double>(occurrences_[t]);
    total += static_cast<double>(occurrences_[t]);
  }
  return total > 0.0 ? masked / total : 0.0;
}

void RateTable::Accumulate(const Document& doc, std::span<const Position> eligible,
                           std::span<const Position> masked) {
  for (Position p : eligible) {
    if (p >= doc.tokens.size() || doc.tokens[p] >= occurrences_.size()) {
      throw Error(ErrorCode::kInvalidToken, "eligible position outside document or vocabulary");
    }
  }
  for (Position p : masked) {
    if (!std::binary_search(eligible.begin(), eligible.end(), p)) {
      throw Error(ErrorCode::kAlignmentError,
                  "masked position " + std::to_string(p) + " of document " +
                      std::to_string(doc.doc_id) + " is not an eligible position");
    }
  }
  for (Position p : eligible) ++occurrences_[doc.tokens[p]];
  for (Position p : masked) ++masked_[doc.tokens[p]];
  ++docs_processed_;
}

void RateTable::Accumulate(const MaskingDecision& decision, const Document& doc,
                           std::span<const Position> eligible) {
  if (decision.doc_id != doc.doc_id) {
    throw Error(ErrorCode::kAlignmentError,
                "decision for document " + std::to_string(decision.doc_id) +
                    " paired with document " + std::to_string(doc.doc_id));
  }
  Accumulate(doc, eligible, decision.chosen.positions);
}

void RateTable::MergeFrom(const RateTable& other) {
  if (other.occurrences_.size() != occurrences_.size()) {
    throw Error(ErrorCode::kShardMismatch, "rate tables cover different vocabularies");
  }
  for (std::size_t t = 0; t < occurrences_.size(); ++t) {
    occurrences_[t] += other.occurrences_[t];
    masked_[t] += other.masked_[t];
  }
  docs_processed_ += other.docs_processed_;
}

void RateTable::RescaleToTarget() {
  scale_ = 1.0;
  const double overall = OverallRate();
  if (overall > 0.0) scale_ = target_rate_ / overall;
}

void RateTable::SaveTsv(const std::filesystem::path& path, const Vocabulary& vocab) const {
  if (vocab.size() != occurrences_.size()) {
    throw Error(ErrorCode::kShardMismatch, "vocabulary does not match rate table size");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "token\toccurrences\tmasked_count\trate\n";
  char buf[32];
  for (TokenId t = 0; t < occurrences_.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.9f", Rate(t));
    out << vocab.Token(t) << '\t' << occurrences_[t] << '\t' << masked_[t] << '\t' << buf
        << '\n';
  }
  if (!out.flush()) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void RateTable::SaveBinary(const std::filesystem::path& path) const {
  internal::BinaryWriter w(path);
  w.Magic("RATE");
  w.Put<std::uint32_t>(kRatesVersion);
  w.Put<std::uint32_t>(vocab_size());
  w.Put<std::uint32_t>(0);
  w.Put<std::uint64_t>(docs_processed_);
  w.Put<double>(target_rate_);
  w.Put<double>(scale_);
  for (std::uint64_t c : occurrences_) w.Put<std::uint64_t>(c);
  for (std::uint64_t c : masked_) w.Put<std::uint64_t>(c);
  w.Close();
}

RateTable RateTable::LoadBinary(const std::filesystem::path& path) {
  internal::BinaryReader r(path);
  r.ExpectMagic("RATE");
  const auto version = r.Get<std::uint32_t>();
  if (version != kRatesVersion) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": unsupported rates version " + std::to_string(version));
  }
  const auto vocab_size = r.Get<std::uint32_t>();
  r.Get<std::uint32_t>();
  RateTable t;
  t.docs_processed_ = r.Get<std::uint64_t>();
  t.target_rate_ = r.Get<double>();
  t.scale_ = r.Get<double>();
  if (!(t.target_rate_ >= 0.0 && t.target_rate_ <= 1.0) || !(t.scale_ >= 0.0)) {
    throw Error(ErrorCode::kFormatError, path.string() + ": invalid rate parameters");
  }
  t.occurrences_.resize(vocab_size);
  t.masked_.resize(vocab_size);
  for (auto& c : t.occurrences_) c = r.Get<std::uint64_t>();
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    t.masked_[i] = r.Get<std::uint64_t>();
    if (t.masked_[i] > t.occurrences_[i]) {
      throw Error(ErrorCode::kFormatError, path.string() + ": masked count exceeds occurrences");
    }
  }
  r.ExpectEnd();
  return t;
}

double ConvergenceDelta(const RateTable& prev, const RateTable& curr, DeltaMode mode) {
  if (prev.vocab_size() != curr.vocab_size()) {
    throw Error(ErrorCode::kShardMismatch, "rate tables cover different vocabularies");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (TokenId t = 0; t < curr.vocab_size(); ++t) {
    if (prev.occurrences()[t] == 0 || curr.occurrences()[t] == 0) continue;
    const double before = prev.Rate(t);
    const double diff = std::abs(curr.Rate(t) - before);
    if (mode == DeltaMode::kRelative) {
      if (before == 0.0) continue;
      sum += diff / before;
    } else {
      sum += diff;
    }
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kUndefined, "no token observed in both rate tables");
  return sum / static_cast<double>(n);
}

std::vector<Position> ApproximateMask(const Document& doc, std::span<const Position> eligible,
                                      const RateTable& rates, std::uint64_t seed) {
  std::vector<Position> out;
  if (eligible.empty()) return out;
  Rng rng(seed);
  for (Position p : eligible) {
    if (rng.Bernoulli(rates.Rate(doc.tokens[p]))) out.push_back(p);
  }
  if (out.empty()) {
    Position best = eligible.front();
    double best_rate = rates.Rate(doc.tokens[best]);
    for (Position p : eligible) {
      const double r = rates.Rate(doc.tokens[p]);
      if (r > best_rate) {
        best = p;
        best_rate = r;
      }
    }
    out.push_back(best);
  }
  return out;
}

FidelityReport CompareRates(const RateTable& reference, const RateTable& candidate,
                            std::uint64_t min_occurrences) {
  if (reference.vocab_size() != candidate.vocab_size()) {
    throw Error(ErrorCode::kShardMismatch, "rate tables cover different vocabularies");
  }
  FidelityReport report;
  report.overall_reference = reference.OverallRate();
  report.overall_candidate = candidate.OverallRate();
  double sum = 0.0;
  for (TokenId t = 0; t < reference.vocab_size(); ++t) {
    const std::uint64_t occ = reference.occurrences()[t];
    if (occ == 0 || occ < min_occurrences || candidate.occurrences()[t] == 0) continue;
    const double diff = std::abs(reference.Rate(t) - candidate.Rate(t));
    sum += diff;
    report.max_abs_diff = std::max(report.max_abs_diff, diff);
    ++report.tokens_compared;
  }
  if (report.tokens_compared > 0) {
    report.mean_abs_diff = sum / static_cast<double>(report.tokens_compared);
  }
  return report;
}

}  // namespace pmimask
