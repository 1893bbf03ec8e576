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

#include "childlm/analysis/ols.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "childlm/common/log.hpp"

namespace childlm::analysis {

double aic(double rss, std::size_t n, std::size_t k) {
  if (n == 0 || !(rss >= 0) || !std::isfinite(rss)) {
    throw std::invalid_argument(fmt::format("aic needs n > 0 and finite rss >= 0 (rss={}, n={})",
                                            rss, n));
  }
  if (rss == 0) {
    log_warning("aic: residual sum of squares is 0; returning -inf");
    return -std::numeric_limits<double>::infinity();
  }
  const double nd = static_cast<double>(n);
  return nd * std::log(rss / nd) + 2.0 * static_cast<double>(k);
}

std::optional<double> r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& predicted) {
  const double sst = (y.array() - y.mean()).square().sum();
  if (sst == 0) return std::nullopt;
  return 1.0 - (y - predicted).squaredNorm() / sst;
}

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& predicted) {
  return std::sqrt((y - predicted).squaredNorm() / static_cast<double>(y.size()));
}

RankDeficientError::RankDeficientError(std::vector<std::string> collinear)
    : std::invalid_argument(fmt::format("design matrix is rank deficient; collinear columns: {}",
                                        fmt::join(collinear, ", "))),
      collinear_(std::move(collinear)) {}

double OlsResult::coefficient(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return coefficients(static_cast<Eigen::Index>(j));
  }
  throw std::invalid_argument(fmt::format("no coefficient named '{}'", name));
}

double OlsResult::p_value(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return p_values(static_cast<Eigen::Index>(j));
  }
  throw std::invalid_argument(fmt::format("no coefficient named '{}'", name));
}

OlsResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              const std::vector<std::string>& names) {
  const auto n = x.rows();
  const auto k = x.cols();
  if (y.size() != n || names.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("ols: X, y and names disagree in size");
  }
  if (n <= k) {
    throw std::invalid_argument(fmt::format("ols needs more rows ({}) than columns ({})", n, k));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    std::vector<std::string> collinear;
    for (Eigen::Index j = qr.rank(); j < k; ++j) {
      collinear.push_back(names[static_cast<std::size_t>(qr.colsPermutation().indices()(j))]);
    }
    std::sort(collinear.begin(), collinear.end());
    throw RankDeficientError(std::move(collinear));
  }
  OlsResult res;
  res.names = names;
  res.coefficients = qr.solve(y);
  const Eigen::VectorXd resid = y - x * res.coefficients;
  res.rss = resid.squaredNorm();
  res.n = static_cast<std::size_t>(n);
  res.k = static_cast<std::size_t>(k);
  const double sst = (y.array() - y.mean()).square().sum();
  res.r2 = sst > 0 ? 1.0 - res.rss / sst : 1.0;
  res.aic = aic(res.rss, res.n, res.k);

  const double df = static_cast<double>(n - k);
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
  const double sigma2 = res.rss / df;
  // A numerically perfect fit has no residual scale: report zero-width
  // errors and call only visibly nonzero coefficients significant.
  const bool exact = res.rss <= 1e-24 * std::max(sst, 1.0);
  const double coef_scale = 1.0 + res.coefficients.cwiseAbs().maxCoeff();
  res.std_errors.resize(k);
  res.t_values.resize(k);
  res.p_values.resize(k);
  boost::math::students_t dist(df);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double b = res.coefficients(j);
    if (exact) {
      res.std_errors(j) = 0.0;
      const bool zero = std::abs(b) <= 1e-9 * coef_scale;
      res.t_values(j) = zero ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
      res.p_values(j) = zero ? 1.0 : 0.0;
      continue;
    }
    const double se = std::sqrt(sigma2 * xtx_inv(j, j));
    res.std_errors(j) = se;
    res.t_values(j) = b / se;
    res.p_values(j) = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(b / se)));
  }
  return res;
}

ScalingFit scaling_fit(const std::vector<ScalingPoint>& points) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : points) {
    if (!(p.tokens > 0) || !std::isfinite(p.value)) {
      throw std::invalid_argument(fmt::format(
          "scaling point in group '{}' needs tokens > 0 and a finite value", p.group));
    }
    counts[p.group] += 1;
  }
  if (counts.size() < 2) throw std::invalid_argument("scaling_fit needs at least 2 groups");
  for (const auto& [g, c] : counts) {
    if (c < 3) {
      throw std::invalid_argument(
          fmt::format("scaling_fit needs at least 3 points per group; '{}' has {}", g, c));
    }
  }
  std::vector<std::string> groups;
  for (const auto& [g, c] : counts) groups.push_back(g);
  const std::size_t extra = groups.size() - 1;
  std::vector<std::string> names = {"intercept"};
  for (std::size_t g = 1; g < groups.size(); ++g) names.push_back(groups[g]);
  names.push_back("log10_tokens");
  for (std::size_t g = 1; g < groups.size(); ++g) names.push_back(groups[g] + ":log10_tokens");

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()),
                                            static_cast<Eigen::Index>(names.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double lt = std::log10(points[i].tokens);
    x(r, 0) = 1.0;
    x(r, static_cast<Eigen::Index>(1 + extra)) = lt;
    const auto g = static_cast<std::size_t>(
        std::find(groups.begin(), groups.end(), points[i].group) - groups.begin());
    if (g > 0) {
      x(r, static_cast<Eigen::Index>(g)) = 1.0;
      x(r, static_cast<Eigen::Index>(1 + extra + g)) = lt;
    }
    y(r) = points[i].value;
  }
  ScalingFit fit;
  fit.reference_group = groups[0];
  fit.ols = ols(x, y, names);
  for (std::size_t g = 1; g < groups.size(); ++g) {
    const auto j = static_cast<Eigen::Index>(1 + extra + g);
    InteractionTest t;
    t.term = names[static_cast<std::size_t>(j)];
    t.estimate = fit.ols.coefficients(j);
    t.std_error = fit.ols.std_errors(j);
    t.p_value = fit.ols.p_values(j);
    t.significant = t.p_value < 0.05;
    fit.interactions.push_back(std::move(t));
  }
  return fit;
}

}  // namespace childlm::analysis
