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

#include "childlm/analysis/predictors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "childlm/common/log.hpp"
#include "childlm/common/parallel.hpp"
#include "childlm/common/stats.hpp"

namespace childlm::analysis {
namespace {

std::vector<std::pair<std::string, double>> rank_scores(
    std::vector<std::pair<std::string, double>> scored) {
  std::erase_if(scored, [](const auto& p) { return !(p.second > 0); });
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return scored;
}

}  // namespace

std::vector<TopFeatureRow> aggregate_top_features(std::span<const RankedList> lists,
                                                  std::size_t k) {
  // Canonical cell order makes the floating-point sums order independent.
  std::vector<const RankedList*> order;
  for (const auto& l : lists) order.push_back(&l);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return std::tie(a->model, a->target, a->method) < std::tie(b->model, b->target, b->method);
  });
  struct Acc {
    TopFeatureRow row;
    double rank_sum = 0.0;
    std::map<std::string, std::pair<double, int>> score_sums;
  };
  std::map<std::string, Acc> acc;
  for (const auto* l : order) {
    const auto ranked = rank_scores(l->features);
    for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
      auto& a = acc[ranked[r].first];
      a.row.feature = ranked[r].first;
      a.row.top_count += 1;
      a.row.per_method[l->method] += 1;
      a.rank_sum += static_cast<double>(r + 1);
      auto& [sum, n] = a.score_sums[l->method];
      sum += ranked[r].second;
      n += 1;
    }
  }
  std::vector<TopFeatureRow> out;
  for (auto& [name, a] : acc) {
    a.row.method_count = static_cast<int>(a.row.per_method.size());
    a.row.mean_rank = a.rank_sum / a.row.top_count;
    auto avg = [&](const std::string& m) -> std::optional<double> {
      const auto it = a.score_sums.find(m);
      if (it == a.score_sums.end()) return std::nullopt;
      return it->second.first / it->second.second;
    };
    a.row.mean_abs_rho = avg("spearman");
    a.row.mean_abs_beta = avg("lasso");
    a.row.mean_importance = avg("gbt");
    out.push_back(std::move(a.row));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.top_count != b.top_count) return a.top_count > b.top_count;
    if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
    return a.feature < b.feature;
  });
  return out;
}

PredictorReport analyze_predictors(
    const std::vector<ExperimentRecord>& records, const std::vector<std::string>& columns,
    const std::map<std::string, std::vector<std::optional<double>>>& features,
    const PredictorOptions& opts, int workers) {
  if (features.empty() || columns.empty()) {
    throw std::invalid_argument("the feature table is empty; run the features step first");
  }
  std::set<std::string> models;
  for (const auto& r : records) models.insert(r.model);

  struct Job {
    std::string model, target;
  };
  std::vector<Job> jobs;
  for (const auto& m : models) {
    for (const auto& t : opts.targets) jobs.push_back({m, t});
  }
  std::vector<std::optional<CellResult>> results(jobs.size());
  std::vector<std::string> reasons(jobs.size());

  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto& job = jobs[j];
    std::map<std::string, std::vector<double>> by_dataset;
    for (const auto& r : records) {
      if (r.model != job.model) continue;
      if (const auto v = r.metric(job.target)) by_dataset[r.dataset].push_back(*v);
    }
    RawDesign raw;
    raw.columns = columns;
    std::vector<double> yv;
    for (const auto& [dataset, values] : by_dataset) {
      const auto f = features.find(dataset);
      if (f == features.end()) continue;
      raw.rows.push_back(dataset);
      raw.cells.push_back(f->second);
      yv.push_back(mean(values));
    }
    if (raw.rows.size() < std::max<std::size_t>(opts.min_rows, 2)) {
      reasons[j] = fmt::format("{}/{}: {} rows with features and a score (need {})", job.model,
                               job.target, raw.rows.size(), opts.min_rows);
      return;
    }
    CellResult cell;
    cell.model = job.model;
    cell.target = job.target;
    cell.datasets = raw.rows;
    cell.design = prepare_design(raw);
    const auto& x = cell.design.design;
    if (x.columns.empty()) {
      reasons[j] = fmt::format("{}/{}: every feature is constant", job.model, job.target);
      return;
    }
    const Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
    for (Eigen::Index c = 0; c < x.x.cols(); ++c) {
      std::vector<double> col(x.x.col(c).begin(), x.x.col(c).end());
      cell.spearman.emplace_back(x.columns[static_cast<std::size_t>(c)], spearman(col, yv));
    }
    auto lasso_opts = opts.lasso;
    lasso_opts.folds = opts.folds;
    GbtCvResult gbt;
    try {
      cell.lasso = lasso_cv(x, y, lasso_opts);
      gbt = gbt_cv(x, y, opts.folds, opts.gbt);
    } catch (const std::exception& e) {
      reasons[j] = fmt::format("{}/{}: {}", job.model, job.target, e.what());
      return;
    }
    cell.gbt_cv_r2 = gbt.cv_r2;
    cell.gbt_cv_rmse = gbt.cv_rmse;
    for (std::size_t c = 0; c < x.columns.size(); ++c) {
      cell.gbt_importance.emplace_back(x.columns[c], gbt.model.importances()(static_cast<Eigen::Index>(c)));
    }
    results[j] = std::move(cell);
  });

  PredictorReport report;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!results[j]) {
      log_warning("analysis cell skipped: " + reasons[j]);
      report.skipped.push_back(reasons[j]);
      continue;
    }
    auto& cell = *results[j];
    RankedList rho{cell.model, cell.target, "spearman", {}};
    for (const auto& [name, v] : cell.spearman) {
      if (v) rho.features.emplace_back(name, std::abs(*v));
    }
    RankedList beta{cell.model, cell.target, "lasso", {}};
    for (std::size_t c = 0; c < cell.lasso.names.size(); ++c) {
      beta.features.emplace_back(cell.lasso.names[c],
                                 std::abs(cell.lasso.coefficients(static_cast<Eigen::Index>(c))));
    }
    RankedList imp{cell.model, cell.target, "gbt", cell.gbt_importance};
    for (auto* l : {&rho, &beta, &imp}) {
      l->features = rank_scores(std::move(l->features));
      report.rankings.push_back(std::move(*l));
    }
    report.cells.push_back(std::move(cell));
  }
  report.top_features = aggregate_top_features(report.rankings, opts.top_k);
  return report;
}

}  // namespace childlm::analysis
