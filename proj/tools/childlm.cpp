// Copyright 2026 The childlm Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// childlm: command-line driver for the corpus-to-analysis pipeline.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/corpus/transcript.hpp"
#include "childlm/pipeline/config.hpp"
#include "childlm/pipeline/demo.hpp"
#include "childlm/pipeline/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace childlm;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  int workers = 0;
  std::string output;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "JSON run config")->required()->check(CLI::ExistingFile);
  sub->add_option("--set", c.overrides, "override a config key, e.g. --set analysis.folds=3");
  sub->add_option("-j,--workers", c.workers, "worker threads (overrides config)")
      ->check(CLI::PositiveNumber);
  sub->add_option("-o,--output", c.output, "output directory (overrides config)");
}

pipeline::RunConfig load(const Common& c) {
  auto overrides = c.overrides;
  if (c.workers > 0) overrides.push_back(fmt::format("workers={}", c.workers));
  if (!c.output.empty()) {
    // Stored as JSON so a path with '=' or digits stays a string.
    overrides.push_back(fmt::format("output_dir=\"{}\"", fs::absolute(c.output).generic_string()));
  }
  return pipeline::load_config(c.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"childlm: child-directed corpora, reference learners and predictor analysis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  Common common;
  auto* ingest = app.add_subcommand("ingest", "validate transcripts and write the family registry");
  auto* run = app.add_subcommand("run", "train and evaluate every condition x seed x model");
  auto* features = app.add_subcommand("features", "linguistic features per condition dataset");
  auto* analyze = app.add_subcommand("analyze", "predictor analysis and scaling fits");
  auto* aoa = app.add_subcommand("aoa", "CDI age of acquisition vs frequency and NLL");
  auto* report = app.add_subcommand("report", "markdown summary of existing outputs");
  auto* all = app.add_subcommand("all", "ingest, run, features, analyze, aoa (if configured), report");
  for (auto* s : {ingest, run, features, analyze, aoa, report, all}) add_common(s, common);

  auto* eval = app.add_subcommand("eval", "score a saved model or external score file");
  add_common(eval, common);
  pipeline::EvalRequest req;
  std::string ngram, scores, embeddings, vocab_condition;
  eval->add_option("--ngram", ngram, "saved n-gram model (JSON)")->check(CLI::ExistingFile);
  eval->add_option("--scores", scores, "JSONL score file")->check(CLI::ExistingFile);
  eval->add_option("--embeddings", embeddings, "saved embedding model (JSON)")
      ->check(CLI::ExistingFile);
  eval->add_option("--label", req.label, "report name")->capture_default_str();
  eval->add_option("--vocab-condition", vocab_condition,
                   "filter items by this condition's vocabulary");

  auto* train = app.add_subcommand("train", "train and save one model for inspection or eval");
  add_common(train, common);
  std::string condition, model;
  std::uint64_t seed = 1;
  train->add_option("--condition", condition, "condition name")->required();
  train->add_option("--model", model, "model name from the config")->required();
  train->add_option("--seed", seed, "split and SVD seed")->capture_default_str();

  auto* demo = app.add_subcommand("demo", "write a synthetic demo workspace");
  std::string demo_dir;
  pipeline::DemoOptions demo_opts;
  demo->add_option("dir", demo_dir, "target directory")->required();
  demo->add_option("--families", demo_opts.families)->capture_default_str();
  demo->add_option("--min-tokens", demo_opts.min_family_tokens)->capture_default_str();
  demo->add_option("--max-tokens", demo_opts.max_family_tokens)->capture_default_str();
  demo->add_option("--series-tokens", demo_opts.series_tokens, "0 disables the series")
      ->capture_default_str();
  demo->add_option("--seed", demo_opts.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (verbose) set_min_log_level(LogLevel::kDebug);
  if (quiet) set_min_log_level(LogLevel::kWarning);

  try {
    if (demo->parsed()) {
      pipeline::write_demo_workspace(demo_dir, demo_opts);
      return 0;
    }
    const auto cfg = load(common);
    if (ingest->parsed()) pipeline::cmd_ingest(cfg);
    if (run->parsed()) pipeline::cmd_run(cfg);
    if (features->parsed()) pipeline::cmd_features(cfg);
    if (analyze->parsed()) pipeline::cmd_analyze(cfg);
    if (aoa->parsed()) pipeline::cmd_aoa(cfg);
    if (report->parsed()) pipeline::cmd_report(cfg);
    if (train->parsed()) pipeline::cmd_train(cfg, condition, model, seed);
    if (eval->parsed()) {
      if (!ngram.empty()) req.ngram = ngram;
      if (!scores.empty()) req.scores = scores;
      if (!embeddings.empty()) req.embeddings = embeddings;
      if (!vocab_condition.empty()) req.vocab_condition = vocab_condition;
      pipeline::cmd_eval(cfg, req);
    }
    if (all->parsed()) {
      pipeline::cmd_ingest(cfg);
      pipeline::cmd_run(cfg);
      pipeline::cmd_features(cfg);
      pipeline::cmd_analyze(cfg);
      if (cfg.aoa.cdi) pipeline::cmd_aoa(cfg);
      pipeline::cmd_report(cfg);
    }
  } catch (const UserError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const corpus::TranscriptError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    for (const auto& i : e.issues()) {
      fmt::print(stderr, "  record {} (line {}): {}\n", i.record_index, i.line, i.message);
    }
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 2;
  }
  return 0;
}
