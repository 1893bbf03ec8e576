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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "childlm/analysis/ols.hpp"
#include "childlm/analysis/predictors.hpp"
#include "childlm/analysis/records.hpp"
#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/parallel.hpp"
#include "childlm/common/stats.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/features/features.hpp"
#include "childlm/features/pos.hpp"
#include "childlm/learners/embeddings.hpp"
#include "childlm/pipeline/pipeline.hpp"
#include "table.hpp"

namespace childlm::pipeline {
namespace {

namespace fs = std::filesystem;

fs::path require_output(const RunConfig& cfg, const std::string& file, const std::string& step) {
  const auto p = cfg.output_dir / file;
  if (!fs::exists(p)) {
    throw UserError(fmt::format("{} not found; run `childlm {}` first", p.string(), step));
  }
  return p;
}

std::string feature_category(const std::string& name) {
  const auto* info = features::find_feature(name);
  return info ? std::string(info->category) : "";
}

void write_predictor_tables(const RunConfig& cfg, const analysis::PredictorReport& report) {
  Table cells({{"model", false},
               {"target", false},
               {"n_rows", true},
               {"n_features", true},
               {"dropped_constant", true},
               {"lasso_alpha", true},
               {"lasso_nonzero", true},
               {"lasso_cv_r2", true},
               {"lasso_cv_rmse", true},
               {"gbt_cv_r2", true},
               {"gbt_cv_rmse", true}});
  Table rankings({{"model", false},
                  {"target", false},
                  {"method", false},
                  {"rank", true},
                  {"feature", false},
                  {"category", false},
                  {"score", true},
                  {"signed_value", true}});
  for (const auto& c : report.cells) {
    cells.add({c.model, c.target, std::to_string(c.datasets.size()),
               std::to_string(c.design.design.columns.size()),
               std::to_string(c.design.dropped_constant.size()), cell(c.lasso.alpha),
               std::to_string(c.lasso.nonzero_count), cell(c.lasso.cv_r2), cell(c.lasso.cv_rmse),
               cell(c.gbt_cv_r2), cell(c.gbt_cv_rmse)});
  }
  for (const auto& l : report.rankings) {
    const auto cit = std::find_if(report.cells.begin(), report.cells.end(), [&](const auto& c) {
      return c.model == l.model && c.target == l.target;
    });
    for (std::size_t r = 0; r < l.features.size(); ++r) {
      const auto& [name, score] = l.features[r];
      std::optional<double> signed_value = score;
      if (cit != report.cells.end() && l.method == "spearman") {
        for (const auto& [n, v] : cit->spearman) {
          if (n == name) signed_value = v;
        }
      } else if (cit != report.cells.end() && l.method == "lasso") {
        for (std::size_t k = 0; k < cit->lasso.names.size(); ++k) {
          if (cit->lasso.names[k] == name) {
            signed_value = cit->lasso.coefficients(static_cast<Eigen::Index>(k));
          }
        }
      }
      rankings.add({l.model, l.target, l.method, std::to_string(r + 1), name,
                    feature_category(name), cell(score), cell(signed_value)});
    }
  }
  std::vector<Column> top_cols = {{"feature", false}, {"category", false}, {"top_count", true},
                                  {"method_count", true}};
  for (const auto& m : analysis::kMethods) top_cols.push_back({m + "_count", true});
  for (const auto& c : {"mean_rank", "mean_abs_rho", "mean_abs_beta", "mean_importance"}) {
    top_cols.push_back({c, true});
  }
  Table top(top_cols);
  for (const auto& t : report.top_features) {
    std::vector<std::string> row = {t.feature, feature_category(t.feature),
                                    std::to_string(t.top_count), std::to_string(t.method_count)};
    for (const auto& m : analysis::kMethods) {
      const auto it = t.per_method.find(m);
      row.push_back(std::to_string(it == t.per_method.end() ? 0 : it->second));
    }
    row.push_back(cell(t.mean_rank));
    row.push_back(cell(t.mean_abs_rho));
    row.push_back(cell(t.mean_abs_beta));
    row.push_back(cell(t.mean_importance));
    top.add(std::move(row));
  }
  Table skipped({{"cell", false}, {"reason", false}});
  for (const auto& s : report.skipped) {
    const auto colon = s.find(": ");
    skipped.add({s.substr(0, colon), colon == std::string::npos ? "" : s.substr(colon + 2)});
  }
  cells.write(cfg.output_dir, "predictor_cells", cfg);
  rankings.write(cfg.output_dir, "predictor_rankings", cfg);
  top.write(cfg.output_dir, "top_features", cfg);
  skipped.write(cfg.output_dir, "predictor_skipped", cfg);
}

void write_scaling_tables(const RunConfig& cfg,
                          const std::vector<analysis::ExperimentRecord>& records,
                          const std::map<std::string, std::string>& group_of) {
  Table plot({{"dataset", false},
              {"group", false},
              {"model", false},
              {"seed", true},
              {"tokens", true},
              {"log10_tokens", true},
              {"metric", false},
              {"value", true}});
  Table scaling({{"model", false},
                 {"metric", false},
                 {"reference_group", false},
                 {"term", false},
                 {"estimate", true},
                 {"std_error", true},
                 {"p_value", true},
                 {"significant", false},
                 {"n", true},
                 {"r2", true},
                 {"aic", true}});
  Table slopes({{"model", false}, {"metric", false}, {"group", false}, {"n", true},
                {"slope_per_log10_tokens", true}});
  std::vector<std::string> models;
  for (const auto& r : records) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  for (const auto& r : records) {
    const auto g = group_of.find(r.dataset);
    const std::string group = g == group_of.end() ? "family" : g->second;
    for (const auto& m : analysis::kRecordMetrics) {
      if (const auto v = r.metric(m)) {
        plot.add({r.dataset, group, r.model, std::to_string(r.seed), cell(r.tokens),
                  cell(std::log10(r.tokens)), m, cell(*v)});
      }
    }
  }
  for (const auto& model : models) {
    for (const auto& metric : analysis::kRecordMetrics) {
      std::vector<analysis::ScalingPoint> points;
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_group;
      for (const auto& r : records) {
        const auto v = r.metric(metric);
        if (r.model != model || !v || !(r.tokens > 0)) continue;
        const auto g = group_of.find(r.dataset);
        const std::string group = g == group_of.end() ? "family" : g->second;
        points.push_back({group, r.tokens, *v});
        by_group[group].first.push_back(std::log10(r.tokens));
        by_group[group].second.push_back(*v);
      }
      for (const auto& [group, xy] : by_group) {
        const auto& [x, y] = xy;
        std::optional<double> slope;
        const double mx = mean(x), my = mean(y);
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          sxx += (x[i] - mx) * (x[i] - mx);
          sxy += (x[i] - mx) * (y[i] - my);
        }
        if (sxx > 0) slope = sxy / sxx;
        slopes.add({model, metric, group, std::to_string(x.size()), cell(slope)});
      }
      if (points.empty()) continue;
      try {
        const auto fit = analysis::scaling_fit(points);
        for (const auto& t : fit.interactions) {
          scaling.add({model, metric, fit.reference_group, t.term, cell(t.estimate),
                       cell(t.std_error), cell(t.p_value), t.significant ? "true" : "false",
                       std::to_string(fit.ols.n), cell(fit.ols.r2), cell(fit.ols.aic)});
        }
      } catch (const std::exception& e) {
        log_info(fmt::format("scaling fit {}/{} skipped: {}", model, metric, e.what()));
      }
    }
  }
  plot.write(cfg.output_dir, "plot_data", cfg);
  scaling.write(cfg.output_dir, "scaling", cfg);
  slopes.write(cfg.output_dir, "scaling_slopes", cfg);
}

}  // namespace

void cmd_features(const RunConfig& cfg) {
  const auto families = load_families(cfg);
  const auto conditions = build_conditions(cfg, families);
  std::optional<features::PosTagger> custom;
  if (cfg.pos_lexicon) {
    custom.emplace(features::PosTagger::load_lexicon(*cfg.pos_lexicon),
                   features::PosTagger::default_rules());
  }
  const auto& tagger = custom ? *custom : features::PosTagger::default_tagger();
  std::vector<features::FeatureVector> rows(conditions.size());
  parallel_for(conditions.size(), cfg.workers, [&](std::size_t i) {
    const auto& c = conditions[i];
    std::optional<learners::EmbeddingModel> emb;
    try {
      learners::EmbeddingOptions eo;
      eo.dim = cfg.feature_embedding_dim;
      eo.seed = derive_seed(cfg.seeds.front(), "features/" + c.name);
      emb = learners::EmbeddingModel::train(c.data, eo);
    } catch (const std::exception& e) {
      log_warning(fmt::format("{}: semantic features skipped: {}", c.name, e.what()));
    }
    rows[i] = features::extract_features(c.data, families, emb ? &*emb : nullptr, tagger,
                                         cfg.feature_options);
  });
  fs::create_directories(cfg.output_dir);
  features::write_feature_csv(cfg.output_dir / "features.csv", rows, cfg.provenance());
  features::write_feature_json(cfg.output_dir / "features.json", rows, cfg.provenance_json());
  log_info(fmt::format("features: {} datasets", rows.size()));
}

void cmd_analyze(const RunConfig& cfg) {
  const auto records =
      analysis::read_records_csv(require_output(cfg, "records.csv", "run"));
  const auto conditions_table = read_csv_file(require_output(cfg, "conditions.csv", "run"));
  const auto feature_rows = features::read_feature_csv(require_output(cfg, "features.csv", "features"));
  if (feature_rows.empty()) {
    throw UserError("the feature table is empty; run `childlm features` on a config with conditions");
  }
  std::map<std::string, std::string> group_of;
  {
    const auto cd = conditions_table.require_column("dataset");
    const auto cg = conditions_table.require_column("group");
    for (const auto& r : conditions_table.rows) group_of[r[cd]] = r[cg];
  }
  std::vector<std::string> columns;
  for (const auto& info : features::feature_catalog()) {
    for (const auto& row : feature_rows) {
      if (row.has(info.name)) {
        columns.push_back(std::string(info.name));
        break;
      }
    }
  }
  std::map<std::string, std::vector<std::optional<double>>> table;
  for (const auto& row : feature_rows) {
    auto& cells = table[row.dataset()];
    for (const auto& c : columns) cells.push_back(row.get(c));
  }
  const auto report = analysis::analyze_predictors(records, columns, table, cfg.analysis, cfg.workers);
  write_predictor_tables(cfg, report);
  write_scaling_tables(cfg, records, group_of);
  log_info(fmt::format("analyze: {} cells fitted, {} skipped", report.cells.size(),
                       report.skipped.size()));
}

}  // namespace childlm::pipeline
