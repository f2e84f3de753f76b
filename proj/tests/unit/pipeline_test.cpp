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

#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pmimask/pipeline.hpp"
#include "support/errors.hpp"
#include "support/planted_corpus.hpp"
#include "support/temp_dir.hpp"

namespace pmimask {
namespace {

using nlohmann::json;
using testing::CodeOf;
using testing::ReadFile;

TEST_CASE("config parsing") {
  const auto c = PipelineConfig::FromJson(
      json{{"corpus", "a.txt"}, {"vocab", "v.txt"}, {"window", 5}, {"policy", {0.8, 0.1, 0.1}},
           {"delta_mode", "relative"}});
  CHECK(c.corpus == std::vector<std::string>{"a.txt"});
  CHECK(c.window == 5);
  CHECK(c.delta_mode == DeltaMode::kRelative);
  CHECK(CodeOf([] { PipelineConfig::FromJson(json{{"windw", 5}}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { PipelineConfig::FromJson(json{{"delta_mode", "log"}}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { PipelineConfig::FromJson(json{{"window", "five"}}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("config file, overrides and relative paths") {
  testing::TempDir dir;
  testing::WriteFile(dir / "cfg.json",
                     R"({"corpus": ["c1.txt", "/abs/c2.txt"], "vocab": "v.txt", "seed": 3})");
  const auto c = PipelineConfig::Load(dir / "cfg.json", json{{"seed", 9}, {"workers", 4}});
  CHECK(c.seed == 9);
  CHECK(c.workers == 4);
  CHECK(c.corpus[0] == (dir / "c1.txt").string());
  CHECK(c.corpus[1] == "/abs/c2.txt");
  CHECK(c.vocab == (dir / "v.txt").string());
  CHECK(CodeOf([&] { PipelineConfig::Load(dir / "missing.json"); }) == ErrorCode::kIoError);
  testing::WriteFile(dir / "bad.json", "{ not json");
  CHECK(CodeOf([&] { PipelineConfig::Load(dir / "bad.json"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("config hash covers only semantic fields") {
  PipelineConfig a;
  a.corpus = {"x"};
  PipelineConfig b = a;
  b.workers = 16;
  b.batch_size = 7;
  b.corpus = {"y"};
  CHECK(a.Hash() == b.Hash());
  CHECK(a.Hash().size() == 16);
  b.seed = 1;
  CHECK(a.Hash() != b.Hash());
}

TEST_CASE("config validation") {
  PipelineConfig c;
  c.corpus = {"x"};
  c.vocab = "v";
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kOk);
  auto bad = [&](auto mutate) {
    PipelineConfig d = c;
    mutate(d);
    return CodeOf([&] { d.Validate(); });
  };
  CHECK(bad([](PipelineConfig& d) { d.window = 0; }) == ErrorCode::kInvalidArgument);
  CHECK(bad([](PipelineConfig& d) { d.rate = 0.0; }) == ErrorCode::kInvalidArgument);
  CHECK(bad([](PipelineConfig& d) { d.candidates = 0; }) == ErrorCode::kInvalidArgument);
  CHECK(bad([](PipelineConfig& d) { d.rate_fraction = 1.5; }) == ErrorCode::kInvalidArgument);
  CHECK(bad([](PipelineConfig& d) { d.workers = 0; }) == ErrorCode::kInvalidArgument);
  CHECK(bad([](PipelineConfig& d) { d.policy = {0.5, 0.5, 0.5}; }) ==
        ErrorCode::kInvalidPolicy);
}

TEST_CASE("decision records round trip") {
  MaskingDecision d;
  d.doc_id = 42;
  d.chosen.positions = {1, 5, 9};
  d.chosen.score = 0.1 + 0.2;
  d.all_scores = {0.3, -1.25, 1e-17};
  d.seed_used = 0xfedcba9876543210ULL;
  const auto line = DecisionToJsonLine(d);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(DecisionFromJsonLine(line) == d);
  CHECK(CodeOf([] { DecisionFromJsonLine("{\"doc_id\": 1}"); }) == ErrorCode::kFormatError);
  CHECK(CodeOf([] { DecisionFromJsonLine("[1,2"); }) == ErrorCode::kFormatError);
}

TEST_CASE("epoch paths") {
  CHECK(EpochPath("out/c.txt", 0, 1) == "out/c.txt");
  CHECK(EpochPath("out/c.txt", 2, 3) == "out/c.epoch2.txt");
  CHECK(EpochPath("out/c", 0, 2) == "out/c.epoch0");
}

// One temp directory with a small planted corpus and a config pointing at it.
struct Workspace {
  testing::TempDir dir;
  PipelineConfig config;

  explicit Workspace(std::size_t tokens = 30000, bool empty = false) {
    testing::PlantedOptions o;
    o.target_tokens = tokens;
    o.topics = 5;
    const auto corpus = testing::MakePlantedCorpus(o);
    corpus.WriteVocab(dir / "vocab.txt");
    if (empty) testing::WriteFile(dir / "corpus.txt", "");
    else corpus.WriteCorpus(dir / "corpus.txt");
    config.corpus = {(dir / "corpus.txt").string()};
    config.vocab = (dir / "vocab.txt").string();
    config.window = 5;
    config.min_count = 2;
    config.seed = 11;
    config.rate_fraction = 0.5;
    config.checkpoint_interval = 50;
    config.convergence_threshold = 0.0;
  }

  std::filesystem::path operator/(const std::string& name) const { return dir / name; }
};

// Runs every stage with the given worker count, writing into `prefix`*.
std::vector<std::string> RunAll(const Workspace& ws, PipelineConfig config,
                                const std::string& prefix) {
  auto p = [&](const std::string& n) { return ws / (prefix + n); };
  RunCount(config, p("counts.bin"));
  RunPmi(config, p("counts.bin"), p("pmi.bin"));
  RunMask(config, p("pmi.bin"), p("dec.jsonl"), p("cor.txt"), p("lab.tsv"));
  RunDeriveRates(config, p("pmi.bin"), p("rates.tsv"), p("rates.bin"), p("conv.tsv"));
  config.epochs = 2;
  RunApproxMask(config, p("rates.bin"), std::nullopt, p("acor.txt"), p("alab.tsv"));
  RunCompare(config, {{"random", "span", "pmi_span", "informask", "informask_approx"},
                      p("pmi.bin"), p("rates.bin"), p("counts.bin")},
             p("cmp.tsv"), p("cmp.json"));
  std::vector<std::string> out;
  for (const char* n : {"counts.bin", "pmi.bin", "dec.jsonl", "cor.txt", "lab.tsv",
                        "rates.tsv", "rates.bin", "conv.tsv", "acor.epoch0.txt",
                        "acor.epoch1.txt", "alab.epoch0.tsv", "alab.epoch1.tsv", "cmp.tsv"}) {
    out.push_back(ReadFile(p(n)));
  }
  return out;
}

TEST_CASE("stage outputs do not depend on the worker count") {
  Workspace ws;
  auto one = ws.config;
  one.workers = 1;
  auto many = ws.config;
  many.workers = 8;
  many.batch_size = 37;
  const auto a = RunAll(ws, one, "w1_");
  const auto b = RunAll(ws, many, "w8_");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK_FALSE(a[i].empty());
    CHECK(a[i] == b[i]);
  }
  CHECK(ReadFile(ws / "w1_cmp.json") == ReadFile(ws / "w8_cmp.json"));
  CHECK(ReadFile(ws / "w1_dec.jsonl.meta.json") == ReadFile(ws / "w8_dec.jsonl.meta.json"));
}

TEST_CASE("mask stage outputs agree with each other") {
  Workspace ws;
  RunCount(ws.config, ws / "c.bin");
  RunPmi(ws.config, ws / "c.bin", ws / "p.bin");
  const auto r = RunMask(ws.config, ws / "p.bin", ws / "d.jsonl", ws / "x.txt", ws / "l.tsv");
  CHECK(std::abs(r["realized_rate"].get<double>() - 0.15) < 0.01);
  const auto decisions = ReadDecisions(ws / "d.jsonl");
  CHECK(decisions.size() == r["documents"].get<std::size_t>());
  std::size_t masked = 0;
  for (const auto& d : decisions) masked += d.chosen.positions.size();
  CHECK(masked == r["masked_tokens"].get<std::size_t>());
  // One label line per masked position.
  const auto labels = ReadFile(ws / "l.tsv");
  CHECK(static_cast<std::size_t>(std::count(labels.begin(), labels.end(), '\n')) == masked);
  const auto corrupted = ReadFile(ws / "x.txt");
  CHECK(static_cast<std::size_t>(std::count(corrupted.begin(), corrupted.end(), '\n')) ==
        decisions.size());
  const auto meta = json::parse(ReadFile(ws / "d.jsonl.meta.json"));
  CHECK(meta["config_hash"] == ws.config.Hash());
  CHECK(meta["stage"] == "mask");
  CHECK(meta["seed"] == 11);
}

TEST_CASE("rate derivation processes the configured fraction") {
  Workspace ws;
  RunCount(ws.config, ws / "c.bin");
  RunPmi(ws.config, ws / "c.bin", ws / "p.bin");
  auto full = ws.config;
  full.rate_fraction = 1.0;
  const auto r = RunDeriveRates(full, ws / "p.bin", ws / "r.tsv", ws / "r.bin", ws / "v.tsv");
  CHECK(r["documents_processed"] == r["corpus_documents"]);
  CHECK(r["converged"] == false);
  const auto log = ReadFile(ws / "v.tsv");
  CHECK(log.starts_with("checkpoint\tdocuments\tdelta\n1\t50\tNA\n"));

  auto early = ws.config;
  early.rate_fraction = 1.0;
  early.convergence_threshold = 1.0;
  const auto e = RunDeriveRates(early, ws / "p.bin", ws / "r2.tsv", ws / "r2.bin", ws / "v2.tsv");
  CHECK(e["converged"] == true);
  CHECK(e["checkpoints"] == 2);
  CHECK(e["documents_processed"] == 100);
}

TEST_CASE("repetition mode replays the same masks every epoch") {
  Workspace ws;
  auto c = ws.config;
  RunCount(c, ws / "c.bin");
  RunPmi(c, ws / "c.bin", ws / "p.bin");
  RunMask(c, ws / "p.bin", ws / "d.jsonl", ws / "x.txt", ws / "l.tsv");
  RunDeriveRates(c, ws / "p.bin", ws / "r.tsv", ws / "r.bin", ws / "v.tsv");
  c.epochs = 3;
  const auto rep = RunApproxMask(c, ws / "r.bin", ws / "d.jsonl", ws / "a.txt", ws / "b.tsv");
  CHECK(rep["mode"] == "repetition");
  CHECK(ReadFile(ws / "b.epoch0.tsv") == ReadFile(ws / "l.tsv"));
  CHECK(ReadFile(ws / "b.epoch0.tsv") == ReadFile(ws / "b.epoch2.tsv"));

  RunApproxMask(c, ws / "r.bin", std::nullopt, ws / "a.txt", ws / "b.tsv");
  CHECK(ReadFile(ws / "b.epoch0.tsv") != ReadFile(ws / "b.epoch1.tsv"));
}

TEST_CASE("an empty corpus yields empty outputs") {
  Workspace ws(1000, true);
  const auto c = ws.config;
  const auto counted = RunCount(c, ws / "c.bin");
  CHECK(counted["documents"] == 0);
  CHECK(CodeOf([&] { RunPmi(c, ws / "c.bin", ws / "p.bin"); }) == ErrorCode::kEmptyCounts);

  // Masking an empty corpus with a table built elsewhere.
  Workspace full(3000);
  RunCount(full.config, full / "c.bin");
  RunPmi(full.config, full / "c.bin", full / "p.bin");
  const auto r = RunMask(c, full / "p.bin", ws / "d.jsonl", ws / "x.txt", ws / "l.tsv");
  CHECK(r["documents"] == 0);
  CHECK(ReadFile(ws / "d.jsonl").empty());
  CHECK(ReadFile(ws / "x.txt").empty());
  CHECK(ReadFile(ws / "l.tsv").empty());
}

TEST_CASE("compare reports missing inputs") {
  Workspace ws(2000);
  const auto c = ws.config;
  CHECK(CodeOf([&] {
          RunCompare(c, {{"informask"}, std::nullopt, std::nullopt, std::nullopt}, ws / "t",
                     ws / "s");
        }) == ErrorCode::kMissingArtifact);
  CHECK(CodeOf([&] {
          RunCompare(c, {{"random", "random"}, std::nullopt, std::nullopt, std::nullopt},
                     ws / "t", ws / "s");
        }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] {
          RunCompare(c, {{"whole_word"}, std::nullopt, std::nullopt, std::nullopt}, ws / "t",
                     ws / "s");
        }) == ErrorCode::kUnknownStrategy);
}

TEST_CASE("artifacts are identified by content") {
  Workspace ws(3000);
  RunCount(ws.config, ws / "c.bin");
  RunPmi(ws.config, ws / "c.bin", ws / "p.bin");
  CHECK(DescribeArtifact(ws.config, ws / "c.bin")["kind"] == "counts");
  CHECK(DescribeArtifact(ws.config, ws / "p.bin")["kind"] == "pmi");
  CHECK(DescribeArtifact(ws.config, ws / "corpus.txt")["kind"] == "corpus");
  CHECK(CodeOf([&] { DescribeArtifact(ws.config, ws / "nope.bin"); }) == ErrorCode::kIoError);
}

}  // namespace
}  // namespace pmimask
