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

// Command-line driver for the masking pipeline. Everything goes through the C
// interface in pmimask.h.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pmimask/pmimask.h"

namespace {

struct Overrides {
  std::vector<std::string> corpus;
  std::string vocab;
  std::uint32_t window = 0;
  std::uint32_t pmi_vocab_size = 0;
  std::uint32_t min_count = 0;
  std::uint32_t candidates = 0;
  double rate = 0;
  bool clip_negative = false;
  std::vector<double> policy;
  std::uint64_t seed = 0;
  double rate_fraction = 0;
  double convergence_threshold = 0;
  std::uint64_t checkpoint_interval = 0;
  std::string delta_mode;
  bool rescale_rates = false;
  std::uint32_t epochs = 0;
  double span_p_geo = 0;
  std::uint32_t span_max_span = 0;
  std::uint32_t span_vocab_max_len = 0;
  std::uint32_t span_vocab_min_count = 0;
  std::uint64_t span_vocab_top_m = 0;
  double span_vocab_min_score = 0;
  std::uint32_t workers = 0;
  std::uint32_t batch_size = 0;
};

class Cli {
 public:
  Cli() : app_("Informative-relevance masking pipeline", "pmimask") {
    app_.set_version_flag("--version", pmk_version());
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.option_defaults()->always_capture_default(false);
    AddConfigOptions();
  }

  int Run(int argc, char** argv) {
    AddCount();
    AddPmi();
    AddMask();
    AddDeriveRates();
    AddApproxMask();
    AddCompare();
    AddStats();
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app_.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app_.exit(e);
    } catch (const CLI::ParseError& e) {
      app_.exit(e);
      return 1;
    }
    return status_;
  }

 private:
  void AddConfigOptions() {
    auto* g = "Configuration overrides";
    app_.add_option("-c,--config", config_path_, "JSON configuration file");
    corpus_opt_ = app_.add_option("--corpus", o_.corpus, "corpus file(s), one document per line")
                      ->group(g);
    auto add = [&](const char* name, auto& field, const char* key, const char* help) {
      CLI::Option* opt = app_.add_option(name, field, help)->group(g);
      opts_.push_back({opt, key});
      return opt;
    };
    add("--vocab", o_.vocab, "vocab", "vocabulary file");
    add("--window", o_.window, "window", "co-occurrence window (default 11)");
    add("--pmi-vocab-size", o_.pmi_vocab_size, "pmi_vocab_size", "PMI vocabulary size");
    add("--min-count", o_.min_count, "min_count", "minimum pair count for a stored PMI value");
    add("-s,--candidates", o_.candidates, "candidates", "candidates per document (default 30)");
    add("--rate", o_.rate, "rate", "target masking rate (default 0.15)");
    add("--policy", o_.policy, "policy", "mask/random/keep probabilities")->expected(3);
    add("--seed", o_.seed, "seed", "global seed");
    add("--rate-fraction", o_.rate_fraction, "rate_fraction",
        "corpus fraction used to derive rates (default 0.01)");
    add("--convergence-threshold", o_.convergence_threshold, "convergence_threshold",
        "early-stop delta; 0 disables (default 0.008)");
    add("--checkpoint-interval", o_.checkpoint_interval, "checkpoint_interval",
        "documents between convergence checkpoints");
    add("--delta-mode", o_.delta_mode, "delta_mode", "absolute or relative")
        ->check(CLI::IsMember({"absolute", "relative"}));
    add("--epochs", o_.epochs, "epochs", "approx-mask epochs");
    add("--span-p", o_.span_p_geo, "span_p_geo", "span length geometric parameter");
    add("--span-max", o_.span_max_span, "span_max_span", "maximum span length");
    add("--span-vocab-max-len", o_.span_vocab_max_len, "span_vocab_max_len",
        "longest collocation for pmi_span");
    add("--span-vocab-min-count", o_.span_vocab_min_count, "span_vocab_min_count",
        "minimum n-gram count for pmi_span");
    add("--span-vocab-top-m", o_.span_vocab_top_m, "span_vocab_top_m",
        "collocation vocabulary size for pmi_span");
    add("--span-vocab-min-score", o_.span_vocab_min_score, "span_vocab_min_score",
        "minimum collocation score for pmi_span");
    add("-j,--workers", o_.workers, "workers", "worker threads");
    add("--batch-size", o_.batch_size, "batch_size", "documents per batch");
    clip_flag_ = app_.add_flag("--clip-negative", o_.clip_negative,
                               "score negative PMI as zero")->group(g);
    rescale_flag_ = app_.add_flag("--rescale-rates", o_.rescale_rates,
                                  "rescale derived rates to the target")->group(g);
  }

  // Builds the override object from the flags that were actually given.
  std::string OverrideJson() const {
    nlohmann::json j = nlohmann::json::object();
    if (corpus_opt_->count()) j["corpus"] = o_.corpus;
    for (const auto& [opt, key] : opts_) {
      if (!opt->count()) continue;
      const std::string k = key;
      if (k == "vocab") j[k] = o_.vocab;
      else if (k == "window") j[k] = o_.window;
      else if (k == "pmi_vocab_size") j[k] = o_.pmi_vocab_size;
      else if (k == "min_count") j[k] = o_.min_count;
      else if (k == "candidates") j[k] = o_.candidates;
      else if (k == "rate") j[k] = o_.rate;
      else if (k == "policy") j[k] = o_.policy;
      else if (k == "seed") j[k] = o_.seed;
      else if (k == "rate_fraction") j[k] = o_.rate_fraction;
      else if (k == "convergence_threshold") j[k] = o_.convergence_threshold;
      else if (k == "checkpoint_interval") j[k] = o_.checkpoint_interval;
      else if (k == "delta_mode") j[k] = o_.delta_mode;
      else if (k == "epochs") j[k] = o_.epochs;
      else if (k == "span_p_geo") j[k] = o_.span_p_geo;
      else if (k == "span_max_span") j[k] = o_.span_max_span;
      else if (k == "span_vocab_max_len") j[k] = o_.span_vocab_max_len;
      else if (k == "span_vocab_min_count") j[k] = o_.span_vocab_min_count;
      else if (k == "span_vocab_top_m") j[k] = o_.span_vocab_top_m;
      else if (k == "span_vocab_min_score") j[k] = o_.span_vocab_min_score;
      else if (k == "workers") j[k] = o_.workers;
      else if (k == "batch_size") j[k] = o_.batch_size;
    }
    if (clip_flag_->count()) j["clip_negative"] = o_.clip_negative;
    if (rescale_flag_->count()) j["rescale_rates"] = o_.rescale_rates;
    return j.dump();
  }

  // Creates the pipeline, runs `stage` and reports on stderr.
  template <typename Fn>
  void Execute(const char* name, Fn&& stage) {
    pmk_pipeline* p = nullptr;
    pmk_status st = pmk_pipeline_create(config_path_.empty() ? nullptr : config_path_.c_str(),
                                        OverrideJson().c_str(), &p);
    if (st == PMK_OK) {
      std::fprintf(stderr, "pmimask %s: %s (config %s)\n", name, pmk_version(),
                   pmk_pipeline_config_hash(p));
      st = stage(p);
    }
    if (st != PMK_OK) {
      std::fprintf(stderr, "pmimask %s: error [%s]: %s\n", name, pmk_status_name(st),
                   pmk_last_error());
    } else if (std::string(name) != "stats") {
      Summarize(pmk_pipeline_report(p));
    }
    pmk_pipeline_destroy(p);
    status_ = pmk_status_exit_code(st);
  }

  static void Summarize(const char* report) {
    const auto j = nlohmann::ordered_json::parse(report);
    for (const auto& [key, value] : j.items()) {
      if (value.is_array() || value.is_object()) continue;
      std::fprintf(stderr, "  %-22s %s\n", key.c_str(), value.dump().c_str());
    }
  }

  void AddCount() {
    auto* cmd = app_.add_subcommand("count", "count windowed co-occurrences");
    cmd->add_option("-o,--out", out_, "counts file")->required();
    cmd->callback([this] {
      Execute("count", [&](pmk_pipeline* p) { return pmk_pipeline_count(p, out_.c_str()); });
    });
  }

  void AddPmi() {
    auto* cmd = app_.add_subcommand("pmi", "build the PMI table from counts");
    cmd->add_option("--counts", counts_, "counts file")->required();
    cmd->add_option("-o,--out", out_, "PMI file")->required();
    cmd->callback([this] {
      Execute("pmi", [&](pmk_pipeline* p) {
        return pmk_pipeline_pmi(p, counts_.c_str(), out_.c_str());
      });
    });
  }

  void AddMask() {
    auto* cmd = app_.add_subcommand("mask", "choose masks by sample-and-score");
    cmd->add_option("--pmi", pmi_, "PMI file")->required();
    cmd->add_option("--decisions", decisions_, "decisions output (JSON lines)")->required();
    cmd->add_option("--corrupted", corrupted_, "corrupted corpus output")->required();
    cmd->add_option("--labels", labels_, "labels output")->required();
    cmd->callback([this] {
      Execute("mask", [&](pmk_pipeline* p) {
        return pmk_pipeline_mask(p, pmi_.c_str(), decisions_.c_str(), corrupted_.c_str(),
                                 labels_.c_str());
      });
    });
  }

  void AddDeriveRates() {
    auto* cmd = app_.add_subcommand("derive-rates", "derive per-token masking rates");
    cmd->add_option("--pmi", pmi_, "PMI file")->required();
    cmd->add_option("-o,--out", out_, "rates TSV")->required();
    cmd->add_option("--out-bin", out_bin_, "binary rates file (default <out>.bin)");
    cmd->add_option("--convergence-log", convergence_,
                    "convergence log (default <out>.convergence.tsv)");
    cmd->callback([this] {
      if (out_bin_.empty()) out_bin_ = out_ + ".bin";
      if (convergence_.empty()) convergence_ = out_ + ".convergence.tsv";
      Execute("derive-rates", [&](pmk_pipeline* p) {
        return pmk_pipeline_derive_rates(p, pmi_.c_str(), out_.c_str(), out_bin_.c_str(),
                                         convergence_.c_str());
      });
    });
  }

  void AddApproxMask() {
    auto* cmd = app_.add_subcommand("approx-mask", "mask from derived per-token rates");
    auto* rates = cmd->add_option("--rates", rates_, "binary rates file");
    cmd->add_option("--repeat-decisions", decisions_,
                    "replay a decisions file every epoch instead")
        ->excludes(rates);
    cmd->add_option("--corrupted", corrupted_, "corrupted corpus output")->required();
    cmd->add_option("--labels", labels_, "labels output")->required();
    cmd->callback([this] {
      Execute("approx-mask", [&](pmk_pipeline* p) {
        return pmk_pipeline_approx_mask(p, rates_.empty() ? nullptr : rates_.c_str(),
                                        decisions_.empty() ? nullptr : decisions_.c_str(),
                                        corrupted_.c_str(), labels_.c_str());
      });
    });
  }

  void AddCompare() {
    auto* cmd = app_.add_subcommand("compare", "compare per-token rates across strategies");
    cmd->add_option("--strategies", strategies_,
                    "random, span, pmi_span, informask, informask_approx")
        ->required()
        ->delimiter(',');
    cmd->add_option("--pmi", pmi_, "PMI file (informask)");
    cmd->add_option("--rates", rates_, "binary rates file (informask_approx)");
    cmd->add_option("--counts", counts_, "counts file (pmi_span)");
    cmd->add_option("-o,--out", out_, "per-token TSV")->required();
    cmd->add_option("--summary", summary_, "summary JSON (default <out>.summary.json)");
    cmd->callback([this] {
      if (summary_.empty()) summary_ = out_ + ".summary.json";
      std::string list;
      for (const auto& s : strategies_) list += (list.empty() ? "" : ",") + s;
      Execute("compare", [&](pmk_pipeline* p) {
        auto opt = [](const std::string& s) { return s.empty() ? nullptr : s.c_str(); };
        return pmk_pipeline_compare(p, list.c_str(), opt(pmi_), opt(rates_), opt(counts_),
                                    out_.c_str(), summary_.c_str());
      });
    });
  }

  void AddStats() {
    auto* cmd = app_.add_subcommand("stats", "describe corpus and artifact files");
    cmd->add_option("files", files_, "files to describe")->required();
    cmd->callback([this] {
      Execute("stats", [&](pmk_pipeline* p) {
        nlohmann::ordered_json all = nlohmann::ordered_json::array();
        for (const auto& f : files_) {
          const pmk_status st = pmk_pipeline_describe(p, f.c_str());
          if (st != PMK_OK) return st;
          all.push_back(nlohmann::ordered_json::parse(pmk_pipeline_report(p)));
        }
        std::cout << all.dump(2) << '\n';
        return PMK_OK;
      });
    });
  }

  CLI::App app_;
  Overrides o_;
  std::string config_path_;
  CLI::Option* corpus_opt_ = nullptr;
  CLI::Option* clip_flag_ = nullptr;
  CLI::Option* rescale_flag_ = nullptr;
  std::vector<std::pair<CLI::Option*, const char*>> opts_;

  std::string out_, out_bin_, convergence_, counts_, pmi_, rates_, decisions_, corrupted_,
      labels_, summary_;
  std::vector<std::string> strategies_, files_;
  int status_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  return cli.Run(argc, argv);
}
