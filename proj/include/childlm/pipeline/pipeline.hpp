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

// Subcommands. Each reads the config, writes its outputs under
// config.output_dir (atomically, with a provenance header) and throws
// UserError for problems the user can fix.
//
//   ingest    registry.json, families.csv
//   run       records.csv, conditions.csv, eval_reports.csv, per-condition copies
//   eval      eval/<label>.csv for a saved model or an external score file
//   features  features.csv
//   analyze   predictor_cells.csv, predictor_rankings.csv, top_features.csv,
//             scaling.csv, plot_data.csv
//   aoa       aoa_estimates.csv, aoa_nll.csv, aoa_words.csv, aoa_comparison.csv
//   report    report.md from whatever of the above exists
//
// Every CSV has a JSON mirror with the same stem.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "childlm/corpus/dataset.hpp"
#include "childlm/pipeline/config.hpp"

namespace childlm::pipeline {

struct Condition {
  std::string name;
  std::string kind;   // individual | mixture | all | series
  std::string group;  // scaling group: "family" or the series name
  corpus::Dataset data;  // as drawn with the first run seed
  // Mixtures and series are redrawn from these for every seed.
  std::vector<corpus::Dataset> sources;
  std::size_t budget = 0;
};

// The condition's dataset for one run seed.
corpus::Dataset condition_dataset(const Condition& c, std::uint64_t seed);

// Family datasets from the manifest, one per family id in first-seen order
// (entries sharing an id are concatenated). Malformed records are collected
// across all files and reported together.
std::vector<corpus::Dataset> load_families(const RunConfig& cfg);

// Individual families, mixtures, all-families and series subsets, in that
// order.
std::vector<Condition> build_conditions(const RunConfig& cfg,
                                        const std::vector<corpus::Dataset>& families);

struct RunSummary {
  std::size_t records = 0;
  std::size_t failures = 0;
};

void cmd_ingest(const RunConfig& cfg);
RunSummary cmd_run(const RunConfig& cfg);

struct EvalRequest {
  std::optional<std::filesystem::path> ngram;       // saved NgramModel
  std::optional<std::filesystem::path> scores;      // external score file
  std::optional<std::filesystem::path> embeddings;  // saved EmbeddingModel
  std::string label = "eval";
  std::optional<std::string> vocab_condition;  // filter items by this condition's vocabulary
};
void cmd_eval(const RunConfig& cfg, const EvalRequest& request);

// Trains one configured model on a condition's training split for `seed`
// and saves it next to the other outputs (models/<condition>-<model>-<seed>).
void cmd_train(const RunConfig& cfg, const std::string& condition, const std::string& model,
               std::uint64_t seed);

void cmd_features(const RunConfig& cfg);
void cmd_analyze(const RunConfig& cfg);
void cmd_aoa(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);

}  // namespace childlm::pipeline
