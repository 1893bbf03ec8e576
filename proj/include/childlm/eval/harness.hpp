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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "childlm/corpus/dataset.hpp"
#include "childlm/eval/items.hpp"
#include "childlm/learners/embeddings.hpp"
#include "childlm/learners/scorer.hpp"

namespace childlm::eval {

// Keeps items whose good and bad tokens all occur in `vocab`.
std::vector<MinimalPairItem> vocab_filter(std::span<const MinimalPairItem> items,
                                          const corpus::Vocabulary& vocab);

struct SubtaskResult {
  std::string name;
  std::size_t n_items_total = 0;
  std::size_t n_items_kept = 0;
  std::optional<double> value;  // nullopt: skipped
};

struct BenchmarkReport {
  std::string benchmark;
  std::string metric;  // "accuracy" (percent) or "spearman"
  std::size_t n_items_total = 0;
  std::size_t n_items_kept = 0;
  // Macro average over subtasks (accuracy) or mean over suites (spearman).
  std::optional<double> value;
  // Pooled accuracy over all kept items; unset for spearman.
  std::optional<double> micro_value;
  std::vector<SubtaskResult> subtasks;  // sorted by name
};

// Forced choice: credit 1 if logprob(good) > logprob(bad), 0.5 on an exact
// tie. All items must belong to `benchmark`. `n_items_total` defaults to
// the number of items given.
BenchmarkReport score_minimal_pairs(const learners::Scorer& scorer,
                                    std::span<const MinimalPairItem> items,
                                    const std::string& benchmark,
                                    std::optional<std::size_t> n_items_total = std::nullopt,
                                    int workers = 1);

// Filters by `vocab` and scores each benchmark found among `items`, in
// benchmark-name order.
std::vector<BenchmarkReport> evaluate_minimal_pairs(const learners::Scorer& scorer,
                                                    std::span<const MinimalPairItem> items,
                                                    const corpus::Vocabulary& vocab,
                                                    int workers = 1);

// Per suite: OOV pairs dropped, Spearman(human, cosine); suites with fewer
// than 3 scorable pairs (or a constant side) are skipped with a warning.
BenchmarkReport score_word_similarity(const learners::EmbeddingModel& emb,
                                      std::span<const WordPairSuite> suites,
                                      const std::string& benchmark = "wordsim");

struct ReportRow {
  std::string dataset;
  std::string model;
  std::uint64_t seed = 0;
  BenchmarkReport report;
};

// CSV: one row per (benchmark, subtask) plus an "all" row per benchmark.
void write_reports_csv(const std::filesystem::path& path, std::span<const ReportRow> rows,
                       const std::string& provenance);
void write_reports_json(const std::filesystem::path& path, std::span<const ReportRow> rows,
                        const std::string& provenance);

}  // namespace childlm::eval
