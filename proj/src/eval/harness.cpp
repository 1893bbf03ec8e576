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

#include "childlm/eval/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/parallel.hpp"
#include "childlm/common/stats.hpp"
#include "json.hpp"

namespace childlm::eval {

std::vector<MinimalPairItem> vocab_filter(std::span<const MinimalPairItem> items,
                                          const corpus::Vocabulary& vocab) {
  auto known = [&](const learners::TokenSeq& toks) {
    for (const auto& t : toks) {
      if (!vocab.contains(t)) return false;
    }
    return true;
  };
  std::vector<MinimalPairItem> kept;
  for (const auto& item : items) {
    if (known(item.good) && known(item.bad)) kept.push_back(item);
  }
  return kept;
}

BenchmarkReport score_minimal_pairs(const learners::Scorer& scorer,
                                    std::span<const MinimalPairItem> items,
                                    const std::string& benchmark,
                                    std::optional<std::size_t> n_items_total, int workers) {
  if (items.empty()) {
    throw std::invalid_argument(
        fmt::format("benchmark '{}' has no items left to score after filtering", benchmark));
  }
  // Half-credits: 2 correct, 1 tie, 0 wrong. Integer sums keep the result
  // independent of scoring order.
  std::vector<int> credit(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) {
    const auto& item = items[i];
    if (item.benchmark != benchmark) {
      throw std::invalid_argument(fmt::format("item '{}' belongs to '{}', not '{}'", item.id,
                                              item.benchmark, benchmark));
    }
    const double good = scorer.score(learners::good_item_id(item.id),
                                     std::span<const learners::TokenSeq>(&item.good, 1)).logprob;
    const double bad = scorer.score(learners::bad_item_id(item.id),
                                    std::span<const learners::TokenSeq>(&item.bad, 1)).logprob;
    credit[i] = good > bad ? 2 : (good == bad ? 1 : 0);
  });

  std::map<std::string, std::pair<long, long>> by_subtask;  // half-credits, count
  long total_credit = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& [c, n] = by_subtask[items[i].subtask];
    c += credit[i];
    n += 1;
    total_credit += credit[i];
  }
  BenchmarkReport report;
  report.benchmark = benchmark;
  report.metric = "accuracy";
  report.n_items_kept = items.size();
  report.n_items_total = n_items_total.value_or(items.size());
  double macro = 0.0;
  for (const auto& [name, cn] : by_subtask) {
    const double acc = 50.0 * static_cast<double>(cn.first) / static_cast<double>(cn.second);
    report.subtasks.push_back({name, static_cast<std::size_t>(cn.second),
                               static_cast<std::size_t>(cn.second), acc});
    macro += acc;
  }
  report.value = macro / static_cast<double>(by_subtask.size());
  report.micro_value = 50.0 * static_cast<double>(total_credit) / static_cast<double>(items.size());
  return report;
}

std::vector<BenchmarkReport> evaluate_minimal_pairs(const learners::Scorer& scorer,
                                                    std::span<const MinimalPairItem> items,
                                                    const corpus::Vocabulary& vocab,
                                                    int workers) {
  std::map<std::string, std::vector<MinimalPairItem>> groups;
  for (const auto& item : items) groups[item.benchmark].push_back(item);
  std::vector<BenchmarkReport> reports;
  for (const auto& [benchmark, group] : groups) {
    const auto kept = vocab_filter(group, vocab);
    auto report = score_minimal_pairs(scorer, kept, benchmark, group.size(), workers);
    std::map<std::string, std::size_t> totals;
    for (const auto& item : group) totals[item.subtask] += 1;
    for (auto& sub : report.subtasks) sub.n_items_total = totals[sub.name];
    for (const auto& [name, n] : totals) {
      const bool present = std::any_of(report.subtasks.begin(), report.subtasks.end(),
                                       [&](const auto& s) { return s.name == name; });
      if (!present) {
        log_warning(fmt::format("{}/{}: every item was filtered out", benchmark, name));
        report.subtasks.push_back({name, n, 0, std::nullopt});
      }
    }
    std::sort(report.subtasks.begin(), report.subtasks.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    reports.push_back(std::move(report));
  }
  return reports;
}

BenchmarkReport score_word_similarity(const learners::EmbeddingModel& emb,
                                      std::span<const WordPairSuite> suites,
                                      const std::string& benchmark) {
  BenchmarkReport report;
  report.benchmark = benchmark;
  report.metric = "spearman";
  double sum = 0.0;
  int scored = 0;
  for (const auto& suite : suites) {
    std::vector<double> human, model;
    for (const auto& p : suite.pairs) {
      const auto c = emb.cosine(p.word1, p.word2);
      if (!c) continue;
      human.push_back(p.human_score);
      model.push_back(*c);
    }
    SubtaskResult sub{suite.name, suite.pairs.size(), human.size(), std::nullopt};
    report.n_items_total += suite.pairs.size();
    report.n_items_kept += human.size();
    if (human.size() < 3) {
      log_warning(fmt::format("word-similarity suite '{}' has {} scorable pairs (< 3); skipped",
                              suite.name, human.size()));
    } else if (const auto rho = spearman(human, model)) {
      sub.value = *rho;
      sum += *rho;
      ++scored;
    } else {
      log_warning(fmt::format("word-similarity suite '{}' has constant scores; skipped",
                              suite.name));
    }
    report.subtasks.push_back(std::move(sub));
  }
  std::sort(report.subtasks.begin(), report.subtasks.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  if (scored > 0) report.value = sum / scored;
  return report;
}

namespace {

std::string value_text(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

}  // namespace

void write_reports_csv(const std::filesystem::path& path, std::span<const ReportRow> rows,
                       const std::string& provenance) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.comment(provenance);
  csv.row({"dataset", "model", "seed", "benchmark", "subtask", "metric", "n_items_total",
           "n_items_kept", "value"});
  for (const auto& r : rows) {
    const auto& rep = r.report;
    const std::string seed = std::to_string(r.seed);
    csv.row({r.dataset, r.model, seed, rep.benchmark, "all", rep.metric,
             std::to_string(rep.n_items_total), std::to_string(rep.n_items_kept),
             value_text(rep.value)});
    for (const auto& s : rep.subtasks) {
      csv.row({r.dataset, r.model, seed, rep.benchmark, s.name, rep.metric,
               std::to_string(s.n_items_total), std::to_string(s.n_items_kept),
               value_text(s.value)});
    }
  }
  write_file_atomic(path, out.str());
}

void write_reports_json(const std::filesystem::path& path, std::span<const ReportRow> rows,
                        const std::string& provenance) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); };
  ordered_json doc;
  doc["provenance"] = provenance;
  ordered_json list = ordered_json::array();
  for (const auto& r : rows) {
    const auto& rep = r.report;
    ordered_json j;
    j["dataset"] = r.dataset;
    j["model"] = r.model;
    j["seed"] = r.seed;
    j["benchmark"] = rep.benchmark;
    j["metric"] = rep.metric;
    j["n_items_total"] = rep.n_items_total;
    j["n_items_kept"] = rep.n_items_kept;
    j["value"] = opt(rep.value);
    if (rep.micro_value) j["micro_value"] = *rep.micro_value;
    ordered_json subs = ordered_json::array();
    for (const auto& s : rep.subtasks) {
      subs.push_back({{"subtask", s.name},
                      {"n_items_total", s.n_items_total},
                      {"n_items_kept", s.n_items_kept},
                      {"value", opt(s.value)}});
    }
    j["subtasks"] = std::move(subs);
    list.push_back(std::move(j));
  }
  doc["reports"] = std::move(list);
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace childlm::eval
