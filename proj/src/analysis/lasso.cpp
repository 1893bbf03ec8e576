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

#include "childlm/analysis/lasso.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace childlm::analysis {

LassoConvergenceError::LassoConvergenceError(double alpha, int sweeps)
    : std::runtime_error(fmt::format(
          "lasso coordinate descent did not converge at alpha={} after {} sweeps", alpha, sweeps)),
      alpha_(alpha),
      sweeps_(sweeps) {}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                   const LassoOptions& opts, const Eigen::VectorXd* warm_start) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (n == 0 || y.size() != n) throw std::invalid_argument("lasso: X and y sizes differ");
  if (!(alpha >= 0)) throw std::invalid_argument("lasso: alpha must be non-negative");
  const Eigen::RowVectorXd xm = x.colwise().mean();
  const double ym = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - xm;
  const Eigen::VectorXd yc = y.array() - ym;
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd scale = xc.colwise().squaredNorm().transpose() * inv_n;

  LassoFit fit;
  fit.beta = warm_start && warm_start->size() == p ? *warm_start : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = yc - xc * fit.beta;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = fit.beta(j);
      double updated = 0.0;
      if (scale(j) > 0) {
        const double z = xc.col(j).dot(r) * inv_n + scale(j) * old;
        updated = soft_threshold(z, alpha) / scale(j);
      }
      if (updated != old) {
        r -= (updated - old) * xc.col(j);
        fit.beta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < opts.tolerance) {
      fit.sweeps = sweep;
      fit.intercept = ym - xm.dot(fit.beta);
      return fit;
    }
  }
  throw LassoConvergenceError(alpha, opts.max_sweeps);
}

double lasso_alpha_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  if (x.cols() == 0) return 0.0;
  return (xc.transpose() * yc).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

std::vector<double> lasso_alpha_grid(double alpha_max, int points, double lo_ratio,
                                     double hi_ratio) {
  if (points < 1 || !(lo_ratio > 0) || !(hi_ratio >= lo_ratio)) {
    throw std::invalid_argument("lasso alpha grid needs points >= 1 and 0 < lo <= hi");
  }
  // A zero alpha_max (y constant) still gets a usable positive grid.
  const double base = alpha_max > 0 ? alpha_max : 1.0;
  std::vector<double> grid;
  const double lhi = std::log(hi_ratio * base), llo = std::log(lo_ratio * base);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid.push_back(std::exp(lhi + t * (llo - lhi)));
  }
  return grid;
}

double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const LassoFit& fit, double alpha) {
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd grad =
      xc.transpose() * (yc - xc * fit.beta) / static_cast<double>(x.rows());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double b = fit.beta(j);
    const double v = b != 0 ? std::abs(grad(j) - alpha * (b > 0 ? 1.0 : -1.0))
                            : std::max(0.0, std::abs(grad(j)) - alpha);
    worst = std::max(worst, v);
  }
  return worst;
}

RegressionResult lasso_cv(const DesignMatrix& design, const Eigen::VectorXd& y,
                          const LassoCvOptions& opts) {
  const auto& x = design.x;
  const auto n = static_cast<std::size_t>(x.rows());
  if (y.size() != x.rows()) throw std::invalid_argument("lasso_cv: X and y sizes differ");
  const std::size_t k = std::min(opts.folds, n);
  const auto folds = contiguous_folds(n, k);
  const auto grid =
      lasso_alpha_grid(lasso_alpha_max(x, y), opts.grid_points, opts.lo_ratio, opts.hi_ratio);

  // oof[a] holds out-of-fold predictions for grid point a.
  std::vector<Eigen::VectorXd> oof(grid.size(), Eigen::VectorXd::Zero(x.rows()));
  std::vector<double> mse(grid.size(), 0.0);
  for (const auto& fold : folds) {
    std::vector<bool> held(n, false);
    for (auto i : fold) held[i] = true;
    Eigen::MatrixXd xt(static_cast<Eigen::Index>(n - fold.size()), x.cols());
    Eigen::VectorXd yt(xt.rows());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (held[i]) continue;
      xt.row(r) = x.row(static_cast<Eigen::Index>(i));
      yt(r++) = y(static_cast<Eigen::Index>(i));
    }
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const auto fit = lasso_fit(xt, yt, grid[a], opts.solver, &warm);
      warm = fit.beta;
      double fold_sse = 0.0;
      for (auto i : fold) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double pred = fit.intercept + x.row(ii).dot(fit.beta);
        oof[a](ii) = pred;
        fold_sse += (y(ii) - pred) * (y(ii) - pred);
      }
      mse[a] += fold_sse / static_cast<double>(fold.size()) / static_cast<double>(folds.size());
    }
  }
  std::size_t best = 0;
  for (std::size_t a = 1; a < grid.size(); ++a) {
    if (mse[a] < mse[best]) best = a;
  }

  // Refit on all rows along the path so the warm start matches the folds.
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
  LassoFit full;
  for (std::size_t a = 0; a <= best; ++a) {
    full = lasso_fit(x, y, grid[a], opts.solver, &warm);
    warm = full.beta;
  }
  RegressionResult res;
  res.names = design.columns;
  res.coefficients = full.beta;
  res.intercept = full.intercept;
  res.alpha = grid[best];
  for (Eigen::Index j = 0; j < full.beta.size(); ++j) {
    if (full.beta(j) != 0.0) ++res.nonzero_count;
  }
  res.cv_r2 = r_squared(y, oof[best]);
  res.cv_rmse = rmse(y, oof[best]);
  const Eigen::VectorXd fitted = (x * full.beta).array() + full.intercept;
  res.rss = (y - fitted).squaredNorm();
  res.n = n;
  res.k = res.nonzero_count + 1;
  res.aic = aic(res.rss, res.n, res.k);
  return res;
}

}  // namespace childlm::analysis
