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

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "childlm/analysis/regression.hpp"

namespace childlm::analysis {

struct OlsResult {
  std::vector<std::string> names;  // one per column of X
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;  // two-sided, Student t with n - k df
  double rss = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  double aic = 0.0;

  double coefficient(const std::string& name) const;
  double p_value(const std::string& name) const;
};

class RankDeficientError : public std::invalid_argument {
 public:
  explicit RankDeficientError(std::vector<std::string> collinear);
  const std::vector<std::string>& collinear() const { return collinear_; }

 private:
  std::vector<std::string> collinear_;
};

// X carries its own intercept column if one is wanted. Requires n > k and
// full column rank; otherwise RankDeficientError names the columns that are
// linear combinations of the others.
OlsResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              const std::vector<std::string>& names);

struct ScalingPoint {
  std::string group;
  double tokens = 0.0;
  double value = 0.0;
};

struct InteractionTest {
  std::string term;  // "<group>:log10_tokens"
  double estimate = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;
  bool significant = false;  // p < 0.05
};

struct ScalingFit {
  std::string reference_group;
  OlsResult ols;
  std::vector<InteractionTest> interactions;  // one per non-reference group
};

// metric ~ group indicators + log10(tokens) + indicator x log10(tokens),
// the alphabetically first group as reference.
ScalingFit scaling_fit(const std::vector<ScalingPoint>& points);

}  // namespace childlm::analysis
