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

// Feature-to-performance analysis: per (model, target) cell, Spearman
// correlations, cross-validated lasso and boosted trees, then a count of
// how often each feature reaches a method's top-k list.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "childlm/analysis/design.hpp"
#include "childlm/analysis/gbt.hpp"
#include "childlm/analysis/lasso.hpp"
#include "childlm/analysis/records.hpp"

namespace childlm::analysis {

inline const std::vector<std::string> kMethods = {"spearman", "lasso", "gbt"};

// One method's ranking in one cell: features with a nonzero score, sorted
// by score descending then name.
struct RankedList {
  std::string model;
  std::string target;
  std::string method;
  std::vector<std::pair<std::string, double>> features;
};

struct TopFeatureRow {
  std::string feature;
  int top_count = 0;     // appearances over all top-k lists
  int method_count = 0;  // distinct methods that listed it
  std::map<std::string, int> per_method;
  double mean_rank = 0.0;  // 1-based, over its appearances
  std::optional<double> mean_abs_rho;
  std::optional<double> mean_abs_beta;
  std::optional<double> mean_importance;
};

// Sorted by top_count desc, mean_rank asc, feature name.
std::vector<TopFeatureRow> aggregate_top_features(std::span<const RankedList> lists,
                                                  std::size_t k = 10);

struct CellResult {
  std::string model;
  std::string target;
  std::vector<std::string> datasets;  // rows used
  PreparedDesign design;
  std::vector<std::pair<std::string, std::optional<double>>> spearman;
  RegressionResult lasso;
  std::optional<double> gbt_cv_r2;
  double gbt_cv_rmse = 0.0;
  std::vector<std::pair<std::string, double>> gbt_importance;
};

struct PredictorOptions {
  std::vector<std::string> targets = {"zorro", "comps", "wordsim"};
  std::size_t folds = 5;
  std::size_t top_k = 10;
  LassoCvOptions lasso;
  GbtOptions gbt;
  std::size_t min_rows = 5;
};

struct PredictorReport {
  std::vector<CellResult> cells;
  std::vector<std::string> skipped;  // "model/target: reason"
  std::vector<RankedList> rankings;
  std::vector<TopFeatureRow> top_features;
};

// `features` maps dataset name to its raw feature cells (column order shared
// through `columns`). Targets are averaged over seeds per (dataset, model).
PredictorReport analyze_predictors(const std::vector<ExperimentRecord>& records,
                                   const std::vector<std::string>& columns,
                                   const std::map<std::string, std::vector<std::optional<double>>>&
                                       features,
                                   const PredictorOptions& opts = {}, int workers = 1);

}  // namespace childlm::analysis
