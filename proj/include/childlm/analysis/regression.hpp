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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace childlm::analysis {

struct RegressionResult {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  std::optional<double> alpha;
  std::size_t nonzero_count = 0;
  std::optional<double> cv_r2;
  std::optional<double> cv_rmse;
  double rss = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;  // estimated parameters including the intercept
  double aic = 0.0;
};

// n ln(rss/n) + 2k. rss == 0 gives -infinity and logs a warning.
double aic(double rss, std::size_t n, std::size_t k);

// Out-of-fold R^2 (1 - SSE/SST) and RMSE.
// nullopt when y is constant.
std::optional<double> r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& predicted);
double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& predicted);

}  // namespace childlm::analysis
