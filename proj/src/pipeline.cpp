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

#include "pmimask/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmimask/cooccur.hpp"
#include "pmimask/corpus.hpp"
#include "pmimask/error.hpp"
#include "pmimask/parallel.hpp"
#include "pmimask/pmi.hpp"
#include "pmimask/rng.hpp"

namespace pmimask {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;
using nlohmann::ordered_json;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
void Take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config key '") + key + "': " + e.what());
  }
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

void FinishOutput(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void RequireFile(const std::filesystem::path& path, const std::string& what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kMissingArtifact, what + " not found: " + path.string());
  }
}

Vocabulary LoadVocab(const PipelineConfig& config) {
  if (config.vocab.empty()) throw Error(ErrorCode::kInvalidArgument, "no vocabulary configured");
  return Vocabulary::Load(config.vocab);
}

std::vector<std::filesystem::path> CorpusPaths(const PipelineConfig& config) {
  if (config.corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "no corpus configured");
  return {config.corpus.begin(), config.corpus.end()};
}

std::string JoinTokens(const std::vector<TokenId>& ids, const Vocabulary& vocab) {
  std::string line;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) line += ' ';
    line += vocab.Token(ids[i]);
  }
  return line;
}

std::string LabelLines(const CorruptedDocument& doc) {
  std::string out;
  for (const Label& l : doc.labels) {
    out += std::to_string(doc.doc_id) + '\t' + std::to_string(l.position) + '\t' +
           std::to_string(l.original) + '\n';
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

PipelineConfig PipelineConfig::FromJson(const json& j) {
  static const char* kKeys[] = {
      "corpus", "vocab", "window", "pmi_vocab_size", "min_count", "candidates", "rate",
      "clip_negative", "policy", "seed", "rate_fraction", "convergence_threshold",
      "checkpoint_interval", "delta_mode", "rescale_rates", "epochs", "span_p_geo",
      "span_max_span", "span_vocab_max_len", "span_vocab_min_count", "span_vocab_top_m",
      "span_vocab_min_score", "workers", "batch_size"};
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    }
  }
  PipelineConfig c;
  if (j.contains("corpus")) {
    if (j["corpus"].is_string()) c.corpus = {j["corpus"].get<std::string>()};
    else Take(j, "corpus", c.corpus);
  }
  Take(j, "vocab", c.vocab);
  Take(j, "window", c.window);
  Take(j, "pmi_vocab_size", c.pmi_vocab_size);
  Take(j, "min_count", c.min_count);
  Take(j, "candidates", c.candidates);
  Take(j, "rate", c.rate);
  Take(j, "clip_negative", c.clip_negative);
  if (j.contains("policy")) {
    std::vector<double> p;
    Take(j, "policy", p);
    if (p.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument, "policy must be [p_mask, p_random, p_keep]");
    }
    c.policy = {p[0], p[1], p[2]};
  }
  Take(j, "seed", c.seed);
  Take(j, "rate_fraction", c.rate_fraction);
  Take(j, "convergence_threshold", c.convergence_threshold);
  Take(j, "checkpoint_interval", c.checkpoint_interval);
  if (j.contains("delta_mode")) {
    std::string mode;
    Take(j, "delta_mode", mode);
    if (mode == "absolute") c.delta_mode = DeltaMode::kAbsolute;
    else if (mode == "relative") c.delta_mode = DeltaMode::kRelative;
    else throw Error(ErrorCode::kInvalidArgument, "delta_mode must be absolute or relative");
  }
  Take(j, "rescale_rates", c.rescale_rates);
  Take(j, "epochs", c.epochs);
  Take(j, "span_p_geo", c.span.p_geo);
  Take(j, "span_max_span", c.span.max_span);
  Take(j, "span_vocab_max_len", c.span_vocab.max_len);
  Take(j, "span_vocab_min_count", c.span_vocab.min_count);
  Take(j, "span_vocab_top_m", c.span_vocab.top_m);
  Take(j, "span_vocab_min_score", c.span_vocab.min_score);
  Take(j, "workers", c.workers);
  Take(j, "batch_size", c.batch_size);
  c.Validate();
  return c;
}

PipelineConfig PipelineConfig::Load(const std::filesystem::path& path, const json& overrides) {
  json merged = json::object();
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open config file " + path.string());
    try {
      merged = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
    }
    // Relative corpus and vocab paths are resolved against the config file.
    const auto base = path.parent_path();
    auto resolve = [&](json& v) {
      if (v.is_string() && std::filesystem::path(v.get<std::string>()).is_relative()) {
        v = (base / v.get<std::string>()).lexically_normal().string();
      }
    };
    if (merged.is_object()) {
      if (merged.contains("vocab")) resolve(merged["vocab"]);
      if (merged.contains("corpus")) {
        if (merged["corpus"].is_array()) {
          for (auto& p : merged["corpus"]) resolve(p);
        } else {
          resolve(merged["corpus"]);
        }
      }
    }
  }
  if (!overrides.is_object()) throw Error(ErrorCode::kInvalidArgument, "overrides must be an object");
  if (!merged.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  for (const auto& [key, value] : overrides.items()) merged[key] = value;
  return FromJson(merged);
}

ordered_json PipelineConfig::SemanticJson() const {
  ordered_json j;
  j["window"] = window;
  j["pmi_vocab_size"] = pmi_vocab_size;
  j["min_count"] = min_count;
  j["candidates"] = candidates;
  j["rate"] = rate;
  j["clip_negative"] = clip_negative;
  j["policy"] = {policy.p_mask, policy.p_random, policy.p_keep};
  j["seed"] = seed;
  j["rate_fraction"] = rate_fraction;
  j["convergence_threshold"] = convergence_threshold;
  j["checkpoint_interval"] = checkpoint_interval;
  j["delta_mode"] = delta_mode == DeltaMode::kAbsolute ? "absolute" : "relative";
  j["rescale_rates"] = rescale_rates;
  j["epochs"] = epochs;
  j["span_p_geo"] = span.p_geo;
  j["span_max_span"] = span.max_span;
  j["span_vocab_max_len"] = span_vocab.max_len;
  j["span_vocab_min_count"] = span_vocab.min_count;
  j["span_vocab_top_m"] = span_vocab.top_m;
  j["span_vocab_min_score"] = span_vocab.min_score;
  return j;
}

ordered_json PipelineConfig::ToJson() const {
  ordered_json j;
  j["corpus"] = corpus;
  j["vocab"] = vocab;
  const auto semantic = SemanticJson();
  for (const auto& [k, v] : semantic.items()) j[k] = v;
  j["workers"] = workers;
  j["batch_size"] = batch_size;
  return j;
}

std::string PipelineConfig::Hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : SemanticJson().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void PipelineConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (window < 2) fail("window must be >= 2");
  if (pmi_vocab_size < 1) fail("pmi_vocab_size must be >= 1");
  if (min_count < 1) fail("min_count must be >= 1");
  masker().Validate();
  policy.Validate();
  if (!(rate_fraction > 0.0 && rate_fraction <= 1.0)) fail("rate_fraction must lie in (0, 1]");
  if (!(convergence_threshold >= 0.0)) fail("convergence_threshold must be >= 0");
  if (checkpoint_interval < 1) fail("checkpoint_interval must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  span.Validate();
  span_vocab.Validate();
  if (workers < 1) fail("workers must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
}

void WriteMetadata(const std::filesystem::path& output, const PipelineConfig& config,
                   const std::string& stage) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["stage"] = stage;
  j["config_hash"] = config.Hash();
  j["seed"] = config.seed;
  j["config"] = config.SemanticJson();
  const auto path = std::filesystem::path(output.string() + ".meta.json");
  auto out = OpenOutput(path);
  out << j.dump(2) << '\n';
  FinishOutput(out, path);
}

// ---------------------------------------------------------------------------
// Decision records
// ---------------------------------------------------------------------------

std::string DecisionToJsonLine(const MaskingDecision& d) {
  ordered_json j;
  j["doc_id"] = d.doc_id;
  j["masked_positions"] = d.chosen.positions;
  j["score"] = d.chosen.score;
  j["candidate_scores"] = d.all_scores;
  j["seed"] = d.seed_used;
  return j.dump();
}

MaskingDecision DecisionFromJsonLine(const std::string& line) {
  try {
    const json j = json::parse(line);
    MaskingDecision d;
    d.doc_id = j.at("doc_id").get<DocId>();
    d.chosen.positions = j.at("masked_positions").get<std::vector<Position>>();
    d.chosen.score = j.at("score").get<double>();
    d.all_scores = j.at("candidate_scores").get<std::vector<double>>();
    if (j.contains("seed")) d.seed_used = j.at("seed").get<std::uint64_t>();
    if (!std::is_sorted(d.chosen.positions.begin(), d.chosen.positions.end())) {
      throw Error(ErrorCode::kFormatError, "masked_positions must be sorted");
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad decision record: ") + e.what());
  }
}

std::vector<MaskingDecision> ReadDecisions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open decisions file " + path.string());
  std::vector<MaskingDecision> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(DecisionFromJsonLine(line));
  }
  return out;
}

std::filesystem::path EpochPath(const std::filesystem::path& path, std::uint32_t epoch,
                                std::uint32_t epochs) {
  if (epochs <= 1) return path;
  auto p = path;
  p.replace_filename(path.stem().string() + ".epoch" + std::to_string(epoch) +
                     path.extension().string());
  return p;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

ordered_json RunCount(const PipelineConfig& config, const std::filesystem::path& out_counts) {
  config.Validate();
  const auto start = Clock::now();
  const Vocabulary vocab = LoadVocab(config);
  CorpusSource corpus(CorpusPaths(config), vocab);
  const auto v = static_cast<std::uint32_t>(vocab.size());
  std::vector<CooccurrenceTable> shards(config.workers, CooccurrenceTable(v, config.window));
  std::vector<Document> batch;
  std::uint64_t documents = 0;
  while (corpus.NextBatch(batch, config.batch_size)) {
    documents += batch.size();
    ParallelChunks(batch.size(), config.workers,
                   [&](std::size_t begin, std::size_t end, std::size_t w) {
                     for (std::size_t i = begin; i < end; ++i) {
                       shards[w].CountDocument(batch[i].tokens);
                     }
                   });
  }
  const CooccurrenceTable table = Merge(shards);
  table.Save(out_counts);
  WriteMetadata(out_counts, config, "count");
  const double secs = SecondsSince(start);
  ordered_json r;
  r["documents"] = documents;
  r["tokens"] = table.total_tokens();
  r["total_pairs"] = table.total_pairs();
  r["distinct_pairs"] = table.distinct_pairs();
  r["seconds"] = secs;
  r["tokens_per_second"] = secs > 0 ? static_cast<double>(table.total_tokens()) / secs : 0.0;
  return r;
}

ordered_json RunPmi(const PipelineConfig& config, const std::filesystem::path& counts,
                    const std::filesystem::path& out_pmi) {
  config.Validate();
  const auto start = Clock::now();
  const CooccurrenceTable table = CooccurrenceTable::Load(counts);
  const PmiTable pmi = PmiTable::Build(table, config.pmi_vocab_size, config.min_count);
  pmi.Save(out_pmi);
  WriteMetadata(out_pmi, config, "pmi");
  ordered_json r;
  r["pmi_vocab_size"] = pmi.pmi_vocab().size();
  r["cutoff_frequency"] = pmi.cutoff_frequency();
  r["values"] = pmi.value_count();
  r["seconds"] = SecondsSince(start);
  return r;
}

ordered_json RunMask(const PipelineConfig& config, const std::filesystem::path& pmi_path,
                     const std::filesystem::path& out_decisions,
                     const std::filesystem::path& out_corrupted,
                     const std::filesystem::path& out_labels) {
  config.Validate();
  const auto start = Clock::now();
  const Vocabulary vocab = LoadVocab(config);
  const PmiTable pmi = PmiTable::Load(pmi_path);
  CorpusSource corpus(CorpusPaths(config), vocab);
  const MaskerOptions options = config.masker();

  auto decisions_out = OpenOutput(out_decisions);
  auto corrupted_out = OpenOutput(out_corrupted);
  auto labels_out = OpenOutput(out_labels);

  struct Output {
    std::string decision;
    std::string corrupted;
    std::string labels;
    std::uint64_t eligible = 0;
    std::uint64_t masked = 0;
    bool skipped = false;
  };
  std::uint64_t documents = 0, skipped = 0, eligible_total = 0, masked_total = 0;
  std::vector<Document> batch;
  std::vector<Output> outputs;
  while (corpus.NextBatch(batch, config.batch_size)) {
    outputs.assign(batch.size(), Output{});
    ParallelChunks(batch.size(), config.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t i = begin; i < end; ++i) {
        const Document& doc = batch[i];
        const auto eligible = EligiblePositions(doc, vocab);
        auto decision = ChooseMasking(doc, eligible, pmi, options, config.seed);
        Output& o = outputs[i];
        o.eligible = eligible.size();
        if (!decision) {
          decision.emplace();
          decision->doc_id = doc.doc_id;
          decision->seed_used = DeriveSeed(config.seed, doc.doc_id, Stream::kCandidates);
          o.skipped = true;
        }
        o.masked = decision->chosen.positions.size();
        o.decision = DecisionToJsonLine(*decision);
        const auto corrupted =
            ApplyCorruption(doc, decision->chosen.positions, vocab, config.policy,
                            DeriveSeed(config.seed, doc.doc_id, Stream::kCorruption));
        o.corrupted = JoinTokens(corrupted.tokens, vocab);
        o.labels = LabelLines(corrupted);
      }
    });
    for (const Output& o : outputs) {
      decisions_out << o.decision << '\n';
      corrupted_out << o.corrupted << '\n';
      labels_out << o.labels;
      eligible_total += o.eligible;
      masked_total += o.masked;
      skipped += o.skipped;
    }
    documents += batch.size();
  }
  FinishOutput(decisions_out, out_decisions);
  FinishOutput(corrupted_out, out_corrupted);
  FinishOutput(labels_out, out_labels);
  for (const auto* p : {&out_decisions, &out_corrupted, &out_labels}) {
    WriteMetadata(*p, config, "mask");
  }
  ordered_json r;
  r["documents"] = documents;
  r["skipped_documents"] = skipped;
  r["eligible_tokens"] = eligible_total;
  r["masked_tokens"] = masked_total;
  r["realized_rate"] =
      eligible_total ? static_cast<double>(masked_total) / static_cast<double>(eligible_total) : 0.0;
  r["seconds"] = SecondsSince(start);
  return r;
}

ordered_json RunDeriveRates(const PipelineConfig& config, const std::filesystem::path& pmi_path,
                            const std::filesystem::path& out_rates_tsv,
                            const std::filesystem::path& out_rates_bin,
                            const std::filesystem::path& out_convergence) {
  config.Validate();
  const auto start = Clock::now();
  const Vocabulary vocab = LoadVocab(config);
  const PmiTable pmi = PmiTable::Load(pmi_path);
  const auto paths = CorpusPaths(config);
  std::uint64_t corpus_docs = 0;
  for (const auto& p : paths) corpus_docs += CountDocuments(p);
  const auto limit = static_cast<std::uint64_t>(
      std::ceil(config.rate_fraction * static_cast<double>(corpus_docs) - 1e-9));
  CorpusSource corpus(paths, vocab);
  const MaskerOptions options = config.masker();

  auto log_out = OpenOutput(out_convergence);
  log_out << "checkpoint\tdocuments\tdelta\n";

  RateTable table(static_cast<std::uint32_t>(vocab.size()), config.rate);
  std::optional<RateTable> previous;
  std::vector<Document> batch;
  std::vector<std::vector<Position>> eligible;
  std::vector<std::optional<MaskingDecision>> decisions;
  std::uint64_t checkpoints = 0;
  bool converged = false;
  std::optional<double> last_delta;
  while (table.docs_processed() < limit && !converged) {
    const std::uint64_t want =
        std::min<std::uint64_t>(config.checkpoint_interval, limit - table.docs_processed());
    if (!corpus.NextBatch(batch, want)) break;
    eligible.assign(batch.size(), {});
    decisions.assign(batch.size(), std::nullopt);
    ParallelChunks(batch.size(), config.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t i = begin; i < end; ++i) {
        eligible[i] = EligiblePositions(batch[i], vocab);
        decisions[i] = ChooseMasking(batch[i], eligible[i], pmi, options, config.seed);
      }
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (decisions[i]) table.Accumulate(*decisions[i], batch[i], eligible[i]);
      else table.AccumulateSkipped();
    }
    ++checkpoints;
    log_out << checkpoints << '\t' << table.docs_processed() << '\t';
    if (previous) {
      try {
        const double delta = ConvergenceDelta(*previous, table, config.delta_mode);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9f", delta);
        log_out << buf;
        last_delta = delta;
        converged = delta < config.convergence_threshold;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefined) throw;
        log_out << "NA";
      }
    } else {
      log_out << "NA";
    }
    log_out << '\n';
    previous = table;
  }
  if (config.rescale_rates) table.RescaleToTarget();
  FinishOutput(log_out, out_convergence);
  table.SaveTsv(out_rates_tsv, vocab);
  table.SaveBinary(out_rates_bin);
  for (const auto* p : {&out_rates_tsv, &out_rates_bin, &out_convergence}) {
    WriteMetadata(*p, config, "derive-rates");
  }
  ordered_json r;
  r["corpus_documents"] = corpus_docs;
  r["documents_processed"] = table.docs_processed();
  r["checkpoints"] = checkpoints;
  r["converged"] = converged;
  r["last_delta"] = last_delta ? ordered_json(*last_delta) : ordered_json(nullptr);
  r["overall_rate"] = table.OverallRate();
  r["seconds"] = SecondsSince(start);
  return r;
}

ordered_json RunApproxMask(const PipelineConfig& config, const std::filesystem::path& rates_bin,
                           const std::optional<std::filesystem::path>& repeat_decisions,
                           const std::filesystem::path& out_corrupted,
                           const std::filesystem::path& out_labels) {
  config.Validate();
  const auto start = Clock::now();
  const Vocabulary vocab = LoadVocab(config);
  std::optional<RateTable> rates;
  std::vector<MaskingDecision> fixed;
  if (repeat_decisions) {
    RequireFile(*repeat_decisions, "decisions file");
    fixed = ReadDecisions(*repeat_decisions);
  } else {
    RequireFile(rates_bin, "rates file");
    rates = RateTable::LoadBinary(rates_bin);
    if (rates->vocab_size() != vocab.size()) {
      throw Error(ErrorCode::kShardMismatch, "rate table does not match the vocabulary");
    }
    if (config.rescale_rates) rates->RescaleToTarget();
  }
  CorpusSource corpus(CorpusPaths(config), vocab);

  std::uint64_t eligible_total = 0, masked_total = 0, documents = 0;
  ordered_json files = ordered_json::array();
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto corrupted_path = EpochPath(out_corrupted, epoch, config.epochs);
    const auto labels_path = EpochPath(out_labels, epoch, config.epochs);
    auto corrupted_out = OpenOutput(corrupted_path);
    auto labels_out = OpenOutput(labels_path);
    // Repetition replays identical corrupted data every epoch.
    const std::uint64_t seed_epoch = repeat_decisions ? 0 : epoch;
    corpus.Rewind();
    std::vector<Document> batch;
    std::vector<std::pair<std::string, std::string>> outputs;
    std::vector<std::uint64_t> eligible_counts, masked_counts;
    while (corpus.NextBatch(batch, config.batch_size)) {
      outputs.assign(batch.size(), {});
      eligible_counts.assign(batch.size(), 0);
      masked_counts.assign(batch.size(), 0);
      ParallelChunks(batch.size(), config.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
          const Document& doc = batch[i];
          const auto eligible = EligiblePositions(doc, vocab);
          std::vector<Position> positions;
          if (repeat_decisions) {
            if (doc.doc_id >= fixed.size() || fixed[doc.doc_id].doc_id != doc.doc_id) {
              throw Error(ErrorCode::kAlignmentError,
                          "decisions file has no record for document " +
                              std::to_string(doc.doc_id));
            }
            positions = fixed[doc.doc_id].chosen.positions;
          } else {
            positions = ApproximateMask(
                doc, eligible, *rates,
                DeriveSeed(config.seed, doc.doc_id, Stream::kApproximate, seed_epoch));
          }
          const auto corrupted = ApplyCorruption(
              doc, positions, vocab, config.policy,
              DeriveSeed(config.seed, doc.doc_id, Stream::kCorruption, seed_epoch));
          outputs[i] = {JoinTokens(corrupted.tokens, vocab), LabelLines(corrupted)};
          eligible_counts[i] = eligible.size();
          masked_counts[i] = positions.size();
        }
      });
      for (std::size_t i = 0; i < batch.size(); ++i) {
        corrupted_out << outputs[i].first << '\n';
        labels_out << outputs[i].second;
        eligible_total += eligible_counts[i];
        masked_total += masked_counts[i];
      }
      documents += batch.size();
    }
    FinishOutput(corrupted_out, corrupted_path);
    FinishOutput(labels_out, labels_path);
    WriteMetadata(corrupted_path, config, "approx-mask");
    WriteMetadata(labels_path, config, "approx-mask");
    files.push_back(corrupted_path.string());
  }
  ordered_json r;
  r["mode"] = repeat_decisions ? "repetition" : "approximation";
  r["epochs"] = config.epochs;
  r["documents"] = documents;
  r["eligible_tokens"] = eligible_total;
  r["masked_tokens"] = masked_total;
  r["realized_rate"] =
      eligible_total ? static_cast<double>(masked_total) / static_cast<double>(eligible_total) : 0.0;
  r["outputs"] = files;
  r["seconds"] = SecondsSince(start);
  return r;
}

ordered_json RunCompare(const PipelineConfig& config, const CompareInputs& inputs,
                        const std::filesystem::path& out_tsv,
                        const std::filesystem::path& out_summary) {
  config.Validate();
  const auto start = Clock::now();
  if (inputs.strategies.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no strategies selected");
  }
  std::vector<StrategyKind> kinds;
  for (const auto& name : inputs.strategies) {
    const StrategyKind k = ParseStrategy(name);
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
      throw Error(ErrorCode::kInvalidArgument, "strategy '" + name + "' selected twice");
    }
    kinds.push_back(k);
  }
  std::sort(kinds.begin(), kinds.end());
  auto need = [](const std::optional<std::filesystem::path>& p, const char* what,
                 StrategyKind k) -> const std::filesystem::path& {
    if (!p) {
      throw Error(ErrorCode::kMissingArtifact, std::string(StrategyName(k)) + " requires " + what);
    }
    RequireFile(*p, what);
    return *p;
  };
  const Vocabulary vocab = LoadVocab(config);
  CorpusSource corpus(CorpusPaths(config), vocab);
  std::optional<PmiTable> pmi;
  std::optional<RateTable> rates;
  std::optional<SpanVocabulary> spans;
  for (StrategyKind k : kinds) {
    if (k == StrategyKind::kInformask) pmi = PmiTable::Load(need(inputs.pmi, "PMI file", k));
    if (k == StrategyKind::kInformaskApprox) {
      rates = RateTable::LoadBinary(need(inputs.rates, "rates file", k));
      if (rates->vocab_size() != vocab.size()) {
        throw Error(ErrorCode::kShardMismatch, "rate table does not match the vocabulary");
      }
      if (config.rescale_rates) rates->RescaleToTarget();
    }
    if (k == StrategyKind::kPmiSpan) {
      const auto counts = CooccurrenceTable::Load(need(inputs.counts, "counts file", k));
      spans = BuildSpanVocabulary(counts, VisitCorpus(corpus), vocab, config.span_vocab);
    }
  }
  std::vector<MaskingStrategy> strategies;
  for (StrategyKind k : kinds) {
    MaskingStrategy s;
    s.kind = k;
    s.rate = config.rate;
    s.span = config.span;
    s.masker = config.masker();
    s.pmi = pmi ? &*pmi : nullptr;
    s.rates = rates ? &*rates : nullptr;
    s.span_vocab = spans ? &*spans : nullptr;
    strategies.push_back(s);
  }
  const ComparisonReport report =
      CompareStrategies(corpus, vocab, strategies, config.seed, config.workers, config.batch_size);
  report.SaveTsv(out_tsv, vocab);
  {
    auto out = OpenOutput(out_summary);
    out << report.SummaryJson() << '\n';
    FinishOutput(out, out_summary);
  }
  WriteMetadata(out_tsv, config, "compare");
  WriteMetadata(out_summary, config, "compare");
  ordered_json r = ordered_json::parse(report.SummaryJson());
  if (spans) r["span_vocabulary_size"] = spans->size();
  r["seconds"] = SecondsSince(start);
  return r;
}

ordered_json DescribeArtifact(const PipelineConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  const std::string head(magic, static_cast<std::size_t>(in.gcount()));
  in.close();
  ordered_json r;
  r["path"] = path.string();
  if (head == "CoOC") {
    const auto t = CooccurrenceTable::Load(path);
    std::uint64_t seen = 0;
    for (auto c : t.unigram()) seen += c > 0;
    r["kind"] = "counts";
    r["vocab_size"] = t.vocab_size();
    r["window"] = t.window();
    r["tokens"] = t.total_tokens();
    r["token_types_seen"] = seen;
    r["total_pairs"] = t.total_pairs();
    r["distinct_pairs"] = t.distinct_pairs();
  } else if (head == "PMI1") {
    const auto t = PmiTable::Load(path);
    double lo = 0, hi = 0, sum = 0;
    bool first = true;
    for (const auto& [key, v] : t.SortedValues()) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      sum += v;
      first = false;
    }
    r["kind"] = "pmi";
    r["pmi_vocab_size"] = t.pmi_vocab().size();
    r["min_count"] = t.min_count();
    r["values"] = t.value_count();
    r["min_value"] = lo;
    r["max_value"] = hi;
    r["mean_value"] = t.value_count() ? sum / static_cast<double>(t.value_count()) : 0.0;
  } else if (head == "RATE") {
    const auto t = RateTable::LoadBinary(path);
    std::uint64_t occ = 0, seen = 0;
    for (auto c : t.occurrences()) {
      occ += c;
      seen += c > 0;
    }
    r["kind"] = "rates";
    r["vocab_size"] = t.vocab_size();
    r["documents_processed"] = t.docs_processed();
    r["target_rate"] = t.target_rate();
    r["overall_rate"] = t.OverallRate();
    r["eligible_tokens"] = occ;
    r["token_types_seen"] = seen;
  } else if (head.starts_with("{")) {
    const auto decisions = ReadDecisions(path);
    std::uint64_t masked = 0, skipped = 0;
    double score = 0.0;
    for (const auto& d : decisions) {
      masked += d.chosen.positions.size();
      skipped += d.all_scores.empty();
      score += d.chosen.score;
    }
    r["kind"] = "decisions";
    r["documents"] = decisions.size();
    r["skipped_documents"] = skipped;
    r["masked_tokens"] = masked;
    r["mean_score"] = decisions.empty() ? 0.0 : score / static_cast<double>(decisions.size());
  } else {
    const Vocabulary vocab = LoadVocab(config);
    DocumentReader reader(path, vocab);
    Document doc;
    std::uint64_t docs = 0, tokens = 0, empty = 0, unknown = 0, special = 0;
    while (reader.Next(doc)) {
      ++docs;
      tokens += doc.tokens.size();
      empty += doc.tokens.empty();
      for (TokenId t : doc.tokens) {
        unknown += vocab.unk_id() && t == *vocab.unk_id();
        special += vocab.IsSpecial(t);
      }
    }
    r["kind"] = "corpus";
    r["documents"] = docs;
    r["empty_documents"] = empty;
    r["tokens"] = tokens;
    r["unknown_tokens"] = unknown;
    r["eligible_tokens"] = tokens - special;
  }
  return r;
}

}  // namespace pmimask
