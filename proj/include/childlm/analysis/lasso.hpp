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

// Lasso by cyclic coordinate descent on
//   (1/2n) ||y - X b - b0||^2 + alpha ||b||_1
// with the intercept profiled out by centering.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "childlm/analysis/design.hpp"
#include "childlm/analysis/regression.hpp"

namespace childlm::analysis {

struct LassoOptions {
  double tolerance = 1e-6;  // max absolute coefficient change in a sweep
  int max_sweeps = 100000;
};

class LassoConvergenceError : public std::runtime_error {
 public:
  LassoConvergenceError(double alpha, int sweeps);
  double alpha() const { return alpha_; }
  int sweeps() const { return sweeps_; }

 private:
  double alpha_;
  int sweeps_;
};

struct LassoFit {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  int sweeps = 0;
};

double soft_threshold(double z, double gamma);

LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                   const LassoOptions& opts = {}, const Eigen::VectorXd* warm_start = nullptr);

// Smallest alpha with an all-zero solution: max_j |x_j^T (y - ybar)| / n on
// centered columns.
double lasso_alpha_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// `points` log-spaced values from hi_ratio*alpha_max down to lo_ratio*alpha_max.
std::vector<double> lasso_alpha_grid(double alpha_max, int points = 50, double lo_ratio = 1e-4,
                                     double hi_ratio = 1e1);

// Largest violation of the subgradient optimality conditions.
double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const LassoFit& fit, double alpha);

struct LassoCvOptions {
  int grid_points = 50;
  double lo_ratio = 1e-4;
  double hi_ratio = 1e1;
  std::size_t folds = 5;  // clamped to n; n gives leave-one-out
  LassoOptions solver;
};

// Alpha minimizing mean held-out MSE over contiguous folds (ties favour the
// larger alpha); cv_r2/cv_rmse from out-of-fold predictions at that alpha;
// coefficients refit on all rows. Expects standardized columns.
RegressionResult lasso_cv(const DesignMatrix& x, const Eigen::VectorXd& y,
                          const LassoCvOptions& opts = {});

}  // namespace childlm::analysis
