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
#include <map>
#include <memory>

#include "childlm/analysis/records.hpp"
#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/parallel.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/corpus/sampling.hpp"
#include "childlm/eval/harness.hpp"
#include "childlm/eval/items.hpp"
#include "childlm/learners/embeddings.hpp"
#include "childlm/learners/ngram.hpp"
#include "childlm/learners/score_table.hpp"
#include "childlm/pipeline/pipeline.hpp"
#include "table.hpp"

namespace childlm::pipeline {
namespace {

namespace fs = std::filesystem;

struct Suites {
  std::vector<eval::MinimalPairItem> pairs;
  std::vector<eval::WordPairSuite> similarity;
};

Suites load_suites(const RunConfig& cfg) {
  Suites s;
  std::set<std::string> ids;
  for (const auto& p : cfg.minimal_pairs) {
    for (auto& item : eval::load_minimal_pairs(p)) {
      if (!ids.insert(item.id).second) {
        throw UserError(fmt::format("{}: item id '{}' already appears in another suite file",
                                    p.string(), item.id));
      }
      s.pairs.push_back(std::move(item));
    }
  }
  for (const auto& p : cfg.word_similarity) s.similarity.push_back(eval::load_word_pairs(p));
  return s;
}

std::vector<eval::BenchmarkReport> evaluate_pairs(const learners::Scorer& scorer,
                                                  const std::vector<eval::MinimalPairItem>& items,
                                                  const corpus::Vocabulary* vocab) {
  if (items.empty()) return {};
  if (vocab) return eval::evaluate_minimal_pairs(scorer, items, *vocab);
  std::map<std::string, std::vector<eval::MinimalPairItem>> by_benchmark;
  for (const auto& it : items) by_benchmark[it.benchmark].push_back(it);
  std::vector<eval::BenchmarkReport> out;
  for (const auto& [name, group] : by_benchmark) {
    out.push_back(eval::score_minimal_pairs(scorer, group, name));
  }
  return out;
}

// Mean per-token NLL of the model over every validation utterance.
eval::BenchmarkReport heldout_report(const learners::NgramModel& model, const corpus::Dataset& val) {
  eval::BenchmarkReport r;
  r.benchmark = "heldout";
  r.metric = "mean_token_nll";
  double sum = 0.0;
  std::size_t tokens = 0;
  for (const auto& c : val.conversations()) {
    for (const auto& u : c.utterances) {
      ++r.n_items_total;
      if (u.tokens.empty()) continue;
      ++r.n_items_kept;
      for (double v : model.token_nlls(u.tokens)) sum += v;
      tokens += u.tokens.size();
    }
  }
  if (tokens > 0) r.value = sum / static_cast<double>(tokens);
  return r;
}

struct TaskOutput {
  std::vector<analysis::ExperimentRecord> records;
  std::vector<eval::ReportRow> reports;
  std::vector<std::vector<std::string>> failures;  // condition, seed, model, stage, message
};

TaskOutput run_task(const RunConfig& cfg, const Condition& c, std::uint64_t seed,
                    const Suites& suites) {
  TaskOutput out;
  const auto seed_text = std::to_string(seed);
  corpus::SplitPair split;
  try {
    split = corpus::split_train_val(condition_dataset(c, seed), cfg.split_ratio,
                                    derive_seed(seed, "split/" + c.name));
  } catch (const std::exception& e) {
    for (const auto& m : cfg.models) out.failures.push_back({c.name, seed_text, m.name, "split", e.what()});
    return out;
  }
  for (const auto& m : cfg.models) {
    analysis::ExperimentRecord rec;
    rec.dataset = c.name;
    rec.model = m.name;
    rec.seed = seed;
    rec.tokens = static_cast<double>(split.train.token_count());
    std::vector<eval::BenchmarkReport> reports;
    try {
      const auto lm =
          learners::NgramModel::train(split.train, {m.order, m.unk_threshold});
      reports = evaluate_pairs(lm, suites.pairs,
                               cfg.vocab_filter ? &split.train.vocabulary() : nullptr);
      reports.push_back(heldout_report(lm, split.val));
    } catch (const std::exception& e) {
      out.failures.push_back({c.name, seed_text, m.name, "ngram", e.what()});
      continue;
    }
    if (!suites.similarity.empty()) {
      try {
        learners::EmbeddingOptions eo;
        eo.dim = m.dim;
        eo.window = m.window;
        eo.seed = derive_seed(seed, "embeddings/" + c.name + "/" + m.name);
        const auto emb = learners::EmbeddingModel::train(split.train, eo);
        reports.push_back(eval::score_word_similarity(emb, suites.similarity));
      } catch (const std::exception& e) {
        out.failures.push_back({c.name, seed_text, m.name, "embeddings", e.what()});
      }
    }
    for (const auto& r : reports) {
      if (r.value && std::find(analysis::kRecordMetrics.begin(), analysis::kRecordMetrics.end(),
                               r.benchmark) != analysis::kRecordMetrics.end()) {
        rec.metrics[r.benchmark] = *r.value;
      }
      out.reports.push_back({c.name, m.name, seed, r});
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

void write_condition_table(const fs::path& dir, const std::vector<Condition>& conditions,
                           const std::vector<analysis::ExperimentRecord>& records,
                           const RunConfig& cfg) {
  std::vector<Column> cols = {{"dataset", false}, {"kind", false},   {"group", false},
                              {"families", true}, {"tokens", true},  {"types", true},
                              {"ttr", true},      {"model", false},  {"seeds", true},
                              {"train_tokens", true}};
  for (const auto& m : analysis::kRecordMetrics) {
    cols.push_back({m + "_mean", true});
    cols.push_back({m + "_sd", true});
  }
  Table t(cols);
  const auto summaries = analysis::summarize_records(records);
  for (const auto& c : conditions) {
    for (const auto& m : cfg.models) {
      const auto it = std::find_if(summaries.begin(), summaries.end(), [&](const auto& s) {
        return s.dataset == c.name && s.model == m.name;
      });
      if (it == summaries.end()) continue;
      std::vector<std::string> row = {c.name,
                                      c.kind,
                                      c.group,
                                      std::to_string(c.data.families().size()),
                                      std::to_string(c.data.token_count()),
                                      std::to_string(c.data.vocabulary().size()),
                                      cell(corpus::ttr(c.data)),
                                      m.name,
                                      std::to_string(it->seeds),
                                      cell(it->tokens)};
      for (const auto& metric : analysis::kRecordMetrics) {
        const auto v = it->metrics.find(metric);
        row.push_back(v == it->metrics.end() ? "NA" : cell(v->second.first));
        row.push_back(v == it->metrics.end() ? "NA" : cell(v->second.second));
      }
      t.add(std::move(row));
    }
  }
  t.write(dir, "conditions", cfg);
}

void write_records(const fs::path& dir, const std::vector<analysis::ExperimentRecord>& records,
                   const std::vector<eval::ReportRow>& reports, const RunConfig& cfg) {
  analysis::write_records_csv(dir / "records.csv", records, cfg.provenance());
  Table mirror({{"dataset", false}, {"model", false}, {"seed", true}, {"tokens", true},
                {"zorro", true},    {"wordsim", true}, {"comps", true}, {"ewok", true}});
  for (const auto& r : records) {
    std::vector<std::string> row = {r.dataset, r.model, std::to_string(r.seed), cell(r.tokens)};
    for (const auto& m : analysis::kRecordMetrics) row.push_back(cell(r.metric(m)));
    mirror.add(std::move(row));
  }
  mirror.write_json(dir / "records.json", cfg);
  eval::write_reports_csv(dir / "eval_reports.csv", reports, cfg.provenance());
  eval::write_reports_json(dir / "eval_reports.json", reports, cfg.provenance());
}

}  // namespace

RunSummary cmd_run(const RunConfig& cfg) {
  if (!fs::exists(cfg.output_dir / "registry.json")) {
    throw UserError(fmt::format("no registry in {}; run `childlm ingest` first",
                                cfg.output_dir.string()));
  }
  const auto families = load_families(cfg);
  const auto conditions = build_conditions(cfg, families);
  const auto suites = load_suites(cfg);
  if (suites.pairs.empty() && suites.similarity.empty()) {
    log_warning("no evaluation suites configured; records will only carry token counts");
  }
  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<TaskOutput> outputs(conditions.size() * n_seeds);
  log_info(fmt::format("run: {} conditions x {} seeds x {} models on {} workers",
                       conditions.size(), n_seeds, cfg.models.size(), cfg.workers));
  parallel_for(outputs.size(), cfg.workers, [&](std::size_t i) {
    const auto& c = conditions[i / n_seeds];
    const auto seed = cfg.seeds[i % n_seeds];
    outputs[i] = run_task(cfg, c, seed, suites);
    log_debug(fmt::format("finished {} seed {}", c.name, seed));
  });

  std::vector<analysis::ExperimentRecord> records;
  std::vector<eval::ReportRow> reports;
  Table failures({{"dataset", false}, {"seed", true}, {"model", false}, {"stage", false},
                  {"message", false}});
  for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
    std::vector<analysis::ExperimentRecord> cond_records;
    std::vector<eval::ReportRow> cond_reports;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      const auto& o = outputs[ci * n_seeds + si];
      cond_records.insert(cond_records.end(), o.records.begin(), o.records.end());
      cond_reports.insert(cond_reports.end(), o.reports.begin(), o.reports.end());
      for (const auto& f : o.failures) {
        log_error(fmt::format("{} seed {} model {} failed at {}: {}", f[0], f[1], f[2], f[3], f[4]));
        failures.add(f);
      }
    }
    const auto dir = cfg.output_dir / "conditions" / file_safe(conditions[ci].name);
    fs::create_directories(dir);
    write_records(dir, cond_records, cond_reports, cfg);
    records.insert(records.end(), cond_records.begin(), cond_records.end());
    reports.insert(reports.end(), cond_reports.begin(), cond_reports.end());
  }
  write_records(cfg.output_dir, records, reports, cfg);
  write_condition_table(cfg.output_dir, conditions, records, cfg);
  failures.write(cfg.output_dir, "failures", cfg);
  if (records.empty()) throw UserError("every condition failed; see failures.csv");
  log_info(fmt::format("run: {} records, {} failures", records.size(), failures.size()));
  return {records.size(), failures.size()};
}

void cmd_train(const RunConfig& cfg, const std::string& condition, const std::string& model,
               std::uint64_t seed) {
  const auto& m = cfg.model(model);
  const auto families = load_families(cfg);
  const auto conditions = build_conditions(cfg, families);
  const auto it = std::find_if(conditions.begin(), conditions.end(),
                               [&](const auto& c) { return c.name == condition; });
  if (it == conditions.end()) throw UserError(fmt::format("no condition named '{}'", condition));
  const auto split = corpus::split_train_val(condition_dataset(*it, seed), cfg.split_ratio,
                                             derive_seed(seed, "split/" + it->name));
  const auto dir = cfg.output_dir / "models";
  fs::create_directories(dir);
  const auto stem = file_safe(fmt::format("{}-{}-{}", it->name, m.name, seed));
  learners::NgramModel::train(split.train, {m.order, m.unk_threshold})
      .save(dir / (stem + ".ngram.json"));
  learners::EmbeddingOptions eo;
  eo.dim = m.dim;
  eo.window = m.window;
  eo.seed = derive_seed(seed, "embeddings/" + it->name + "/" + m.name);
  learners::EmbeddingModel::train(split.train, eo).save(dir / (stem + ".embeddings.json"));
  log_info(fmt::format("saved {}/{}.*", dir.string(), stem));
}

void cmd_eval(const RunConfig& cfg, const EvalRequest& request) {
  if (request.ngram.has_value() == request.scores.has_value() && !request.embeddings) {
    throw UserError("eval needs --ngram or --scores (not both), and/or --embeddings");
  }
  if (request.ngram && request.scores) throw UserError("eval takes --ngram or --scores, not both");
  const auto suites = load_suites(cfg);
  std::optional<corpus::Vocabulary> vocab;
  if (request.vocab_condition) {
    const auto families = load_families(cfg);
    for (const auto& c : build_conditions(cfg, families)) {
      if (c.name == *request.vocab_condition) vocab = c.data.vocabulary();
    }
    if (!vocab) {
      throw UserError(fmt::format("no condition named '{}'", *request.vocab_condition));
    }
  }
  std::vector<eval::ReportRow> rows;
  std::unique_ptr<learners::Scorer> scorer;
  if (request.ngram) {
    scorer = std::make_unique<learners::NgramModel>(learners::NgramModel::load(*request.ngram));
  } else if (request.scores) {
    scorer = std::make_unique<learners::ScoreTable>(learners::ScoreTable::load(*request.scores));
  }
  if (scorer) {
    for (auto& r : evaluate_pairs(*scorer, suites.pairs, vocab ? &*vocab : nullptr)) {
      rows.push_back({request.vocab_condition.value_or(""), request.label, 0, std::move(r)});
    }
  }
  if (request.embeddings) {
    if (suites.similarity.empty()) throw UserError("--embeddings given but no word_similarity suites");
    const auto emb = learners::EmbeddingModel::load(*request.embeddings);
    rows.push_back({request.vocab_condition.value_or(""), request.label, 0,
                    eval::score_word_similarity(emb, suites.similarity)});
  }
  const auto dir = cfg.output_dir / "eval";
  fs::create_directories(dir);
  const auto stem = file_safe(request.label);
  eval::write_reports_csv(dir / (stem + ".csv"), rows, cfg.provenance());
  eval::write_reports_json(dir / (stem + ".json"), rows, cfg.provenance());
  for (const auto& r : rows) {
    log_info(fmt::format("{} {}: {} ({} of {} items)", r.report.benchmark, r.report.metric,
                         r.report.value ? format_number(*r.report.value) : "NA",
                         r.report.n_items_kept, r.report.n_items_total));
  }
}

}  // namespace childlm::pipeline
