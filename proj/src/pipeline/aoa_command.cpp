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

#include <cmath>
#include <map>
#include <set>

#include "childlm/aoa/aoa.hpp"
#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/parallel.hpp"
#include "childlm/learners/ngram.hpp"
#include "childlm/learners/score_table.hpp"
#include "childlm/pipeline/pipeline.hpp"
#include "table.hpp"

namespace childlm::pipeline {
namespace {

struct SettingNll {
  std::map<std::string, double> mean;
  std::map<std::string, std::size_t> occurrences;
  std::map<std::string, std::size_t> models;  // models that saw the word
};

SettingNll from_summary(const std::map<std::string, aoa::NllSummary>& s) {
  SettingNll out;
  for (const auto& [w, v] : s) {
    out.mean[w] = v.mean_token_nll;
    out.occurrences[w] = v.occurrence_count;
    out.models[w] = 1;
  }
  return out;
}

// Per word: mean over the family models of each model's mean NLL.
SettingNll individual_nll(const RunConfig& cfg, const ModelSpec& spec,
                          const std::vector<corpus::Dataset>& families,
                          const corpus::Dataset& pooled, const std::set<std::string>& lexicon) {
  std::vector<std::optional<std::map<std::string, aoa::NllSummary>>> per(families.size());
  parallel_for(families.size(), cfg.workers, [&](std::size_t i) {
    try {
      const auto lm = learners::NgramModel::train(families[i], {spec.order, spec.unk_threshold});
      const auto& corpus = cfg.aoa.nll_corpus == "own" ? families[i] : pooled;
      per[i] = aoa::word_mean_nll(lm, corpus, lexicon, cfg.aoa.chunk_words, 1);
    } catch (const std::exception& e) {
      log_warning(fmt::format("aoa: family '{}' model skipped: {}", families[i].name(), e.what()));
    }
  });
  SettingNll out;
  std::map<std::string, std::vector<double>> values;
  for (const auto& p : per) {
    if (!p) continue;
    for (const auto& [w, v] : *p) {
      values[w].push_back(v.mean_token_nll);
      out.occurrences[w] += v.occurrence_count;
    }
  }
  for (auto& [w, v] : values) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    out.mean[w] = sum / static_cast<double>(v.size());
    out.models[w] = v.size();
  }
  return out;
}

}  // namespace

void cmd_aoa(const RunConfig& cfg) {
  if (!cfg.aoa.cdi) throw UserError("no CDI file configured (aoa.cdi)");
  const auto words = aoa::read_cdi_csv(*cfg.aoa.cdi);
  if (words.empty()) throw UserError(fmt::format("{}: no CDI rows", cfg.aoa.cdi->string()));

  std::vector<std::optional<aoa::AoaEstimate>> estimates(words.size());
  parallel_for(words.size(), cfg.workers, [&](std::size_t i) {
    try {
      estimates[i] = aoa::fit_aoa(words[i]);
    } catch (const std::invalid_argument& e) {
      log_warning(fmt::format("aoa: {}", e.what()));
    }
  });
  Table est({{"word", false},
             {"lexical_category", false},
             {"concreteness", true},
             {"b_intercept", true},
             {"b_age", true},
             {"aoa_months", true},
             {"converged", false},
             {"defined", false},
             {"iterations", true},
             {"gradient_norm", true}});
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < words.size(); ++i) {
    index[words[i].word] = i;
    const auto& e = estimates[i];
    if (!e) {
      est.add({words[i].word, std::string(aoa::category_name(words[i].category)),
               cell(words[i].concreteness), "NA", "NA", "NA", "false", "false", "0", "NA"});
      continue;
    }
    if (!e->converged) log_warning(fmt::format("aoa: fit for '{}' did not converge", e->word));
    est.add({e->word, std::string(aoa::category_name(words[i].category)),
             cell(words[i].concreteness), cell(e->b_intercept), cell(e->b_age),
             cell(e->aoa_months), e->converged ? "true" : "false", e->defined ? "true" : "false",
             std::to_string(e->iterations), cell(e->gradient_norm)});
  }

  const auto families = load_families(cfg);
  const auto pooled = corpus::concatenate("all", families);
  std::set<std::string> lexicon;
  for (const auto& w : words) lexicon.insert(w.word);
  const auto& spec = cfg.aoa.model.empty() ? cfg.models.front() : cfg.model(cfg.aoa.model);

  Table nll_table({{"setting", false},
                   {"word", false},
                   {"mean_token_nll", true},
                   {"occurrence_count", true},
                   {"models", true}});
  Table word_table({{"setting", false},
                    {"word", false},
                    {"lexical_category", false},
                    {"concreteness", true},
                    {"aoa_months", true},
                    {"log_frequency", true},
                    {"mean_nll", true}});
  Table comparison({{"setting", false},
                    {"model", false},
                    {"n_words", true},
                    {"base_aic", true},
                    {"nll_aic", true},
                    {"delta_aic", true},
                    {"base_r2", true},
                    {"nll_r2", true},
                    {"r_logfreq_nll", true},
                    {"category_merges", false}});
  Table coefficients({{"setting", false},
                      {"regression", false},
                      {"term", false},
                      {"estimate", true},
                      {"std_error", true},
                      {"p_value", true}});

  for (const auto& setting : cfg.aoa.settings) {
    SettingNll nll;
    std::string label = spec.name;
    if (setting == "all") {
      const auto lm = learners::NgramModel::train(pooled, {spec.order, spec.unk_threshold});
      nll = from_summary(aoa::word_mean_nll(lm, pooled, lexicon, cfg.aoa.chunk_words, cfg.workers));
    } else if (setting == "individual") {
      nll = individual_nll(cfg, spec, families, pooled, lexicon);
      label += "/" + cfg.aoa.nll_corpus;
    } else {
      const auto table = learners::ScoreTable::load(*cfg.aoa.scores);
      label = table.name();
      nll = from_summary(aoa::word_mean_nll(table, pooled, lexicon, cfg.aoa.chunk_words, cfg.workers));
    }
    for (const auto& [w, v] : nll.mean) {
      nll_table.add({setting, w, cell(v), std::to_string(nll.occurrences[w]),
                     std::to_string(nll.models[w])});
    }
    std::vector<aoa::AoaWordRow> rows;
    for (const auto& w : words) {
      const auto& e = estimates[index[w.word]];
      const auto freq = pooled.vocabulary().find(w.word);
      const auto n = nll.mean.find(w.word);
      if (!e || !e->defined || !e->aoa_months || freq == pooled.vocabulary().end() ||
          n == nll.mean.end()) {
        continue;
      }
      aoa::AoaWordRow row{w.word, w.category, w.concreteness, *e->aoa_months,
                          std::log(static_cast<double>(freq->second)), n->second};
      word_table.add({setting, row.word, std::string(aoa::category_name(row.category)),
                      cell(row.concreteness), cell(row.aoa_months), cell(row.log_frequency),
                      cell(row.mean_nll)});
      rows.push_back(row);
    }
    try {
      const auto cmp = aoa::aoa_regressions(rows);
      std::string merges;
      for (const auto& m : cmp.category_merges) merges += (merges.empty() ? "" : "; ") + m;
      comparison.add({setting, label, std::to_string(cmp.n_words), cell(cmp.base.aic),
                      cell(cmp.nll.aic), cell(cmp.delta_aic), cell(cmp.base.r2), cell(cmp.nll.r2),
                      cell(cmp.r_logfreq_nll), merges});
      for (const auto* fit : {&cmp.base, &cmp.nll}) {
        for (std::size_t k = 0; k < fit->names.size(); ++k) {
          const auto i = static_cast<Eigen::Index>(k);
          coefficients.add({setting, fit == &cmp.base ? "base" : "nll", fit->names[k],
                            cell(fit->coefficients(i)), cell(fit->std_errors(i)),
                            cell(fit->p_values(i))});
        }
      }
      log_info(fmt::format("aoa {}: {} words, AIC base {:.2f} vs NLL {:.2f}", setting,
                           cmp.n_words, cmp.base.aic, cmp.nll.aic));
    } catch (const std::exception& e) {
      log_warning(fmt::format("aoa {}: regressions skipped: {}", setting, e.what()));
    }
  }
  std::filesystem::create_directories(cfg.output_dir);
  est.write(cfg.output_dir, "aoa_estimates", cfg);
  nll_table.write(cfg.output_dir, "aoa_nll", cfg);
  word_table.write(cfg.output_dir, "aoa_words", cfg);
  comparison.write(cfg.output_dir, "aoa_comparison", cfg);
  coefficients.write(cfg.output_dir, "aoa_coefficients", cfg);
}

}  // namespace childlm::pipeline
