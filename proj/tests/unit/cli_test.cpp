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

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support/temp_dir.hpp"

namespace {

namespace testing = pmimask::testing;

const std::string kSource = PMIMASK_SOURCE_DIR;
const std::string kMiniConfig = kSource + "/data/mini/config.json";

std::string Quote(const std::string& s) { return "'" + s + "'"; }

// Runs the command-line tool; stdout and stderr go to files in `dir`.
int Run(const testing::TempDir& dir, const std::string& args) {
  const std::string cmd = Quote(PMIMASK_CLI) + " " + args + " >" +
                          Quote((dir / "stdout").string()) + " 2>" +
                          Quote((dir / "stderr").string());
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string P(const testing::TempDir& dir, const std::string& name) {
  return Quote((dir / name).string());
}

TEST_CASE("golden artifacts on the mini corpus") {
  testing::TempDir dir;
  const std::string c = "-c " + Quote(kMiniConfig) + " ";
  REQUIRE(Run(dir, c + "count -o " + P(dir, "c.bin")) == 0);
  CHECK(testing::ReadFile(dir / "c.bin") ==
        testing::ReadFile(kSource + "/tests/golden/mini_counts.bin"));
  const auto err = testing::ReadFile(dir / "stderr");
  CHECK(err.starts_with("pmimask count: 0.3.0 (config "));
  REQUIRE(Run(dir, c + "pmi --counts " + P(dir, "c.bin") + " -o " + P(dir, "p.bin")) == 0);
  CHECK(testing::ReadFile(dir / "p.bin") ==
        testing::ReadFile(kSource + "/tests/golden/mini_pmi.bin"));
  const auto meta = nlohmann::json::parse(testing::ReadFile(dir / "p.bin.meta.json"));
  CHECK(meta["stage"] == "pmi");
  CHECK(meta["seed"] == 7);

  // Rerunning reproduces the file.
  REQUIRE(Run(dir, c + "pmi --counts " + P(dir, "c.bin") + " -o " + P(dir, "p2.bin")) == 0);
  CHECK(testing::ReadFile(dir / "p2.bin") == testing::ReadFile(dir / "p.bin"));

  REQUIRE(Run(dir, "stats " + P(dir, "c.bin") + " " + P(dir, "p.bin")) == 0);
  const auto stats = nlohmann::json::parse(testing::ReadFile(dir / "stdout"));
  CHECK(stats.size() == 2);
  CHECK(stats[0]["kind"] == "counts");
  CHECK(stats[1]["kind"] == "pmi");
}

TEST_CASE("exit codes") {
  testing::TempDir dir;
  const std::string c = "-c " + Quote(kMiniConfig) + " ";
  CHECK(Run(dir, "--version") == 0);
  CHECK(testing::ReadFile(dir / "stdout").find("0.3.0") != std::string::npos);
  CHECK(Run(dir, "") == 1);
  CHECK(Run(dir, "frobnicate") == 1);
  CHECK(Run(dir, c + "count") == 1);
  CHECK(Run(dir, c + "--window 0 count -o " + P(dir, "x")) == 1);
  CHECK(Run(dir, c + "--policy 0.5 0.5 0.5 count -o " + P(dir, "x")) == 1);
  CHECK(Run(dir, "-c " + P(dir, "missing.json") + " count -o " + P(dir, "x")) == 2);
  CHECK(Run(dir, c + "--vocab /nonexistent/v.txt count -o " + P(dir, "x")) == 2);

  REQUIRE(Run(dir, c + "count -o " + P(dir, "c.bin")) == 0);
  REQUIRE(Run(dir, c + "pmi --counts " + P(dir, "c.bin") + " -o " + P(dir, "p.bin")) == 0);
  CHECK(Run(dir, c + "compare --strategies random,bert -o " + P(dir, "t.tsv")) == 1);
  CHECK(Run(dir, c + "compare --strategies informask -o " + P(dir, "t.tsv")) == 2);
  CHECK(testing::ReadFile(dir / "stderr").find("MissingArtifact") != std::string::npos);
  CHECK(Run(dir, c + "compare --strategies random --counts " + P(dir, "none.bin") + " -o " +
                     P(dir, "t.tsv")) == 0);
  CHECK(Run(dir, c + "mask --pmi " + P(dir, "none.bin") + " --decisions " + P(dir, "d") +
                     " --corrupted " + P(dir, "x") + " --labels " + P(dir, "l")) == 2);

  // Data errors.
  testing::WriteFile(dir / "junk.bin", "not a counts file at all");
  CHECK(Run(dir, c + "pmi --counts " + P(dir, "junk.bin") + " -o " + P(dir, "q.bin")) == 3);
  CHECK(Run(dir, c + "mask --pmi " + P(dir, "c.bin") + " --decisions " + P(dir, "d") +
                     " --corrupted " + P(dir, "x") + " --labels " + P(dir, "l")) == 3);
  testing::WriteFile(dir / "empty.txt", "\n\n");
  REQUIRE(Run(dir, c + "--corpus " + P(dir, "empty.txt") + " count -o " + P(dir, "e.bin")) == 0);
  CHECK(Run(dir, c + "pmi --counts " + P(dir, "e.bin") + " -o " + P(dir, "q.bin")) == 3);
  CHECK(testing::ReadFile(dir / "stderr").find("EmptyCounts") != std::string::npos);

  // An empty corpus masks to empty outputs.
  CHECK(Run(dir, c + "--corpus " + P(dir, "empty.txt") + " mask --pmi " + P(dir, "p.bin") +
                     " --decisions " + P(dir, "ed") + " --corrupted " + P(dir, "ex") +
                     " --labels " + P(dir, "el")) == 0);
  CHECK(testing::ReadFile(dir / "el").empty());
}

std::vector<std::string> Pipeline(const testing::TempDir& dir, const std::string& tag,
                                  int workers) {
  const std::string c =
      "-c " + Quote(kMiniConfig) + " -j " + std::to_string(workers) + " --batch-size 1 ";
  auto p = [&](const std::string& n) { return P(dir, tag + n); };
  REQUIRE(Run(dir, c + "count -o " + p("c.bin")) == 0);
  REQUIRE(Run(dir, c + "pmi --counts " + p("c.bin") + " -o " + p("p.bin")) == 0);
  REQUIRE(Run(dir, c + "mask --pmi " + p("p.bin") + " --decisions " + p("d.jsonl") +
                       " --corrupted " + p("x.txt") + " --labels " + p("l.tsv")) == 0);
  REQUIRE(Run(dir, c + "derive-rates --pmi " + p("p.bin") + " -o " + p("r.tsv")) == 0);
  REQUIRE(Run(dir, c + "--epochs 2 approx-mask --rates " + p("r.tsv.bin") + " --corrupted " +
                       p("a.txt") + " --labels " + p("b.tsv")) == 0);
  REQUIRE(Run(dir, c + "compare --strategies random,span,pmi_span,informask,informask_approx" +
                       " --pmi " + p("p.bin") + " --rates " + p("r.tsv.bin") + " --counts " +
                       p("c.bin") + " -o " + p("t.tsv")) == 0);
  std::vector<std::string> out;
  for (const char* n : {"c.bin", "p.bin", "d.jsonl", "x.txt", "l.tsv", "r.tsv", "r.tsv.bin",
                        "r.tsv.convergence.tsv", "a.epoch0.txt", "a.epoch1.txt",
                        "b.epoch0.tsv", "b.epoch1.tsv", "t.tsv"}) {
    out.push_back(testing::ReadFile(dir / (tag + n)));
  }
  return out;
}

TEST_CASE("stages compose on the mini corpus within a minute") {
  testing::TempDir dir;
  const auto start = std::chrono::steady_clock::now();
  Pipeline(dir, "", 1);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(60));
}

TEST_CASE("realized mask rate on the demo corpus") {
  testing::TempDir dir;
  const std::string c = "-c " + Quote(kSource + "/data/demo/config.json") + " ";
  REQUIRE(Run(dir, c + "count -o " + P(dir, "c.bin")) == 0);
  REQUIRE(Run(dir, c + "pmi --counts " + P(dir, "c.bin") + " -o " + P(dir, "p.bin")) == 0);
  REQUIRE(Run(dir, c + "mask --pmi " + P(dir, "p.bin") + " --decisions " + P(dir, "d") +
                       " --corrupted " + P(dir, "x") + " --labels " + P(dir, "l")) == 0);
  // Realized rate from the labels: one line per masked position.
  const auto labels = testing::ReadFile(dir / "l");
  const auto masked = static_cast<double>(std::count(labels.begin(), labels.end(), '\n'));
  REQUIRE(Run(dir, c + "stats " + Quote(kSource + "/data/demo/corpus.txt")) == 0);
  const auto stats = nlohmann::json::parse(testing::ReadFile(dir / "stdout"));
  const double eligible = stats[0]["eligible_tokens"].get<double>();
  CHECK(eligible >= 1e5);
  CHECK(std::abs(masked / eligible - 0.15) <= 0.01);

  // Same seed, same masks.
  REQUIRE(Run(dir, c + "mask --pmi " + P(dir, "p.bin") + " --decisions " + P(dir, "d2") +
                       " --corrupted " + P(dir, "x2") + " --labels " + P(dir, "l2")) == 0);
  CHECK(testing::ReadFile(dir / "d2") == testing::ReadFile(dir / "d"));
  REQUIRE(Run(dir, c + "--seed 2 mask --pmi " + P(dir, "p.bin") + " --decisions " +
                       P(dir, "d3") + " --corrupted " + P(dir, "x3") + " --labels " +
                       P(dir, "l3")) == 0);
  CHECK(testing::ReadFile(dir / "d3") != testing::ReadFile(dir / "d"));
}

TEST_CASE("every stage is identical across worker counts") {
  testing::TempDir dir;
  const auto a = Pipeline(dir, "w1_", 1);
  const auto b = Pipeline(dir, "w8_", 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK_FALSE(a[i].empty());
    CHECK(a[i] == b[i]);
  }
}

}  // namespace
