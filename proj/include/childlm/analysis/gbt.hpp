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

// Gradient-boosted regression trees, squared loss, exact greedy splits.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "childlm/analysis/design.hpp"

namespace childlm::analysis {

struct GbtOptions {
  int rounds = 200;
  int depth = 3;
  double learning_rate = 0.1;
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

class GbtModel {
 public:
  double base_score() const { return base_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  // Split gain per feature, normalized to sum 1 (all zero without splits).
  const Eigen::VectorXd& importances() const { return importances_; }
  // Training RSS after each round; front() is the RSS of the base score.
  const std::vector<double>& train_rss() const { return train_rss_; }

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

 private:
  friend GbtModel gbt_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const GbtOptions& opts);
  double base_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<RegressionTree> trees_;
  Eigen::VectorXd importances_;
  std::vector<double> train_rss_;
};

// Needs n >= 5. A constant target yields a model with no trees (warning).
GbtModel gbt_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GbtOptions& opts = {});

struct GbtCvResult {
  GbtModel model;  // fit on all rows
  std::optional<double> cv_r2;
  double cv_rmse = 0.0;
};

GbtCvResult gbt_cv(const DesignMatrix& x, const Eigen::VectorXd& y, std::size_t folds,
                   const GbtOptions& opts = {});

}  // namespace childlm::analysis
