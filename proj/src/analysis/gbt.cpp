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

#include "childlm/analysis/gbt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "childlm/analysis/regression.hpp"
#include "childlm/common/log.hpp"

namespace childlm::analysis {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& g, int max_depth,
              Eigen::VectorXd& importance)
      : x_(x), g_(g), max_depth_(max_depth), importance_(importance) {}

  RegressionTree build() {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(x_.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double sum = 0.0;
    for (auto r : rows) sum += g_(r);
    tree_.nodes[id].value = sum / static_cast<double>(rows.size());
    if (depth >= max_depth_ || rows.size() < 2) return id;
    const Split s = best_split(rows, sum);
    if (s.feature < 0) return id;
    importance_(s.feature) += s.gain;
    std::vector<Eigen::Index> left, right;
    for (auto r : rows) (x_(r, s.feature) <= s.threshold ? left : right).push_back(r);
    tree_.nodes[id].feature = s.feature;
    tree_.nodes[id].threshold = s.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  // Gain = SSE(parent) - SSE(left) - SSE(right). Strict improvement is
  // required to replace the incumbent, so ties keep the lowest column and
  // the lowest threshold.
  Split best_split(const std::vector<Eigen::Index>& rows, double total) const {
    const double n = static_cast<double>(rows.size());
    const double parent = total * total / n;
    Split best;
    const double min_gain = 1e-12 * std::max(1.0, parent);
    std::vector<Eigen::Index> sorted = rows;
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](auto a, auto b) { return x_(a, f) < x_(b, f); });
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left_sum += g_(sorted[i]);
        const double xv = x_(sorted[i], f), xn = x_(sorted[i + 1], f);
        if (xv == xn) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
        if (gain > best.gain && gain > min_gain) {
          best = {static_cast<int>(f), 0.5 * (xv + xn), gain};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& g_;
  int max_depth_;
  Eigen::VectorXd& importance_;
  RegressionTree tree_;
};

}  // namespace

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    id = row(nodes[id].feature) <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  }
  return nodes[id].value;
}

double GbtModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  double p = base_;
  for (const auto& t : trees_) p += learning_rate_ * t.predict(row);
  return p;
}

Eigen::VectorXd GbtModel::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
  return out;
}

GbtModel gbt_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GbtOptions& opts) {
  if (x.rows() != y.size()) throw std::invalid_argument("gbt: X and y sizes differ");
  if (x.rows() < 5) {
    throw std::invalid_argument(fmt::format("gbt needs at least 5 rows, got {}", x.rows()));
  }
  if (opts.rounds < 0 || opts.depth < 1 || !(opts.learning_rate > 0)) {
    throw std::invalid_argument("gbt needs rounds >= 0, depth >= 1 and learning_rate > 0");
  }
  GbtModel m;
  m.learning_rate_ = opts.learning_rate;
  m.base_ = y.mean();
  Eigen::VectorXd gains = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), m.base_);
  m.train_rss_.push_back((y - pred).squaredNorm());
  if ((y.array() == y(0)).all()) {
    log_warning("gbt: target is constant; no trees fitted");
    m.importances_ = gains;
    return m;
  }
  for (int round = 0; round < opts.rounds; ++round) {
    const Eigen::VectorXd residual = y - pred;
    TreeBuilder builder(x, residual, opts.depth, gains);
    RegressionTree tree = builder.build();
    if (tree.nodes.size() == 1) break;  // no split improves the fit
    for (Eigen::Index i = 0; i < x.rows(); ++i) pred(i) += opts.learning_rate * tree.predict(x.row(i));
    m.trees_.push_back(std::move(tree));
    m.train_rss_.push_back((y - pred).squaredNorm());
  }
  const double total = gains.sum();
  m.importances_ = total > 0 ? Eigen::VectorXd(gains / total) : gains;
  return m;
}

GbtCvResult gbt_cv(const DesignMatrix& design, const Eigen::VectorXd& y, std::size_t folds,
                   const GbtOptions& opts) {
  const auto& x = design.x;
  const auto n = static_cast<std::size_t>(x.rows());
  Eigen::VectorXd oof(x.rows());
  for (const auto& fold : contiguous_folds(n, std::min(folds, n))) {
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
    const auto m = gbt_fit(xt, yt, opts);
    for (auto i : fold) {
      const auto ii = static_cast<Eigen::Index>(i);
      oof(ii) = m.predict_row(x.row(ii));
    }
  }
  GbtCvResult res{gbt_fit(x, y, opts), r_squared(y, oof), rmse(y, oof)};
  return res;
}

}  // namespace childlm::analysis
