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

// Run configuration. A single JSON document drives every subcommand; paths
// inside it are relative to the directory holding the config file.
//
//   {
//     "manifest": "data/manifest.json",
//     "output_dir": "out",
//     "seeds": [1, 2, 3, 4, 5],
//     "workers": 2,
//     "split_ratio": 0.85,
//     "transcripts": {"layout": "single_line", "speaker_aliases": {"GMA": "OTHER"}},
//     "conditions": {
//       "individual": true,
//       "mixtures": [{"name": "top3", "top": 3, "budget": 0}],
//       "all_families": true,
//       "series": [{"name": "td", "transcripts": "td.txt", "budgets": [10000, 40000]}]
//     },
//     "models": [{"name": "kn3-d50", "order": 3, "dim": 50, "window": 5}],
//     "eval": {"minimal_pairs": ["suites/zorro.jsonl"], "word_similarity": ["suites/sim.tsv"],
//              "vocab_filter": true},
//     "features": {"mattr_window": 50, "zipf_top_types": 1000, "embedding_dim": 50,
//                  "pos_lexicon": null},
//     "analysis": {"targets": ["zorro", "comps", "wordsim"], "folds": 5, "top_k": 10,
//                  "lasso_grid_points": 50, "gbt_rounds": 200, "gbt_depth": 3,
//                  "gbt_learning_rate": 0.1, "min_rows": 5},
//     "aoa": {"cdi": "cdi.csv", "model": "kn3-d50", "settings": ["individual", "all"],
//             "nll_corpus": "own", "chunk_words": 180, "scores": null}
//   }
//
// Overrides use dotted keys: --set analysis.folds=3 --set seeds=[1,2].

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "childlm/analysis/predictors.hpp"
#include "childlm/corpus/transcript.hpp"
#include "childlm/features/features.hpp"

namespace childlm::pipeline {

struct ModelSpec {
  std::string name;
  int order = 3;
  int dim = 100;
  int window = 5;
  std::size_t unk_threshold = 1;
};

struct MixtureSpec {
  std::string name;
  std::size_t top = 0;                // largest families, ties by id
  std::vector<std::string> families;  // explicit list instead of `top`
  std::size_t budget = 0;             // 0: tokens of the largest member
};

struct SeriesSpec {
  std::string name;
  std::filesystem::path transcripts;
  std::vector<std::size_t> budgets;
};

struct AoaSettings {
  std::optional<std::filesystem::path> cdi;
  std::string model;  // empty: first model
  std::vector<std::string> settings = {"individual", "all"};
  std::string nll_corpus = "own";  // own | pooled, for the individual setting
  std::size_t chunk_words = 180;
  std::optional<std::filesystem::path> scores;
};

struct RunConfig {
  std::filesystem::path base_dir;
  std::string hash;  // 16 hex digits over the canonical document

  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  double split_ratio = 0.85;
  corpus::TranscriptLayout layout = corpus::TranscriptLayout::kSingleLine;
  corpus::SpeakerAliases aliases = corpus::SpeakerAliases::defaults();

  bool individual = true;
  bool all_families = true;
  std::vector<MixtureSpec> mixtures;
  std::vector<SeriesSpec> series;

  std::vector<ModelSpec> models;

  std::vector<std::filesystem::path> minimal_pairs;
  std::vector<std::filesystem::path> word_similarity;
  bool vocab_filter = true;

  features::FeatureOptions feature_options;
  int feature_embedding_dim = 50;
  std::optional<std::filesystem::path> pos_lexicon;

  analysis::PredictorOptions analysis;
  AoaSettings aoa;

  const ModelSpec& model(const std::string& name) const;
  // "childlm <version> config=<hash>"
  std::string provenance() const;
  std::string provenance_json() const;
};

// Parses, applies overrides ("a.b=value"; value read as JSON when it parses,
// else as a string) and validates. Throws UserError.
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const std::vector<std::string>& overrides = {});

}  // namespace childlm::pipeline
