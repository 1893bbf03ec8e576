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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "childlm/analysis/ols.hpp"
#include "childlm/corpus/dataset.hpp"
#include "childlm/learners/scorer.hpp"

namespace childlm::aoa {

enum class LexicalCategory { kNoun, kVerb, kAdjective, kFunctionWord, kOther };

// noun, verb, adjective, function_word, other
std::string_view category_name(LexicalCategory c);
std::optional<LexicalCategory> parse_category(std::string_view name);

struct CdiObservation {
  double age_months = 0.0;
  long n_producing = 0;
  long n_total = 0;
};

struct CdiWord {
  std::string word;
  LexicalCategory category = LexicalCategory::kOther;
  double concreteness = 0.0;
  std::vector<CdiObservation> observations;
};

// Long format: word, lexical_category, concreteness, age_months,
// n_producing, n_total. Rows of one word must agree on category and
// concreteness. Words keep first-appearance order.
std::vector<CdiWord> read_cdi_csv(const std::filesystem::path& path);
void write_cdi_csv(const std::filesystem::path& path, const std::vector<CdiWord>& words,
                   const std::string& provenance);

// Gaussian priors, standard deviation parameterization.
struct AoaPriors {
  double intercept_mean = 0.0;
  double intercept_sd = 2.5;
  double slope_mean = 0.3;
  double slope_sd = 0.1;
};

struct AoaEstimate {
  std::string word;
  double b_intercept = 0.0;
  double b_age = 0.0;
  std::optional<double> aoa_months;  // -b_intercept / b_age when b_age > 0
  bool converged = false;
  bool defined = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // of the log posterior at the returned point
};

// MAP of logit p(age) = b0 + b_age * age under the priors, by damped Newton
// steps from the prior means; converged when the step's max-norm < 1e-8.
AoaEstimate fit_aoa(const CdiWord& w, const AoaPriors& priors = {}, int max_iterations = 100,
                    double tolerance = 1e-8);

// Utterances [begin, end) of one conversation.
struct Chunk {
  std::size_t conversation = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t words = 0;
  bool oversized = false;  // a single utterance longer than the limit
};

// Word = non-punctuation token. Recursively bisects at the utterance
// boundary nearest the word-count midpoint (earlier boundary on ties) until
// every chunk has at most max_words words.
std::vector<Chunk> chunk_conversation(const corpus::Conversation& c, std::size_t conversation,
                                      std::size_t max_words = 180);

struct NllSummary {
  std::string word;
  double mean_token_nll = 0.0;  // nats
  std::size_t occurrence_count = 0;
};

// Mean token NLL of each lexicon word over its occurrences in `d`, scoring
// each chunk as one item (ids conv<i>:chunk<j>). Words never seen are
// absent from the result.
std::map<std::string, NllSummary> word_mean_nll(const learners::Scorer& scorer,
                                                const corpus::Dataset& d,
                                                const std::set<std::string>& lexicon,
                                                std::size_t max_words = 180, int workers = 1);

struct AoaWordRow {
  std::string word;
  LexicalCategory category = LexicalCategory::kOther;
  double concreteness = 0.0;
  double aoa_months = 0.0;
  double log_frequency = 0.0;
  double mean_nll = 0.0;
};

struct AoaComparison {
  analysis::OlsResult base;  // AoA ~ log frequency
  analysis::OlsResult nll;   // AoA ~ mean NLL
  double delta_aic = 0.0;    // nll.aic - base.aic
  std::optional<double> r_logfreq_nll;
  std::size_t n_words = 0;
  std::vector<std::string> category_merges;  // "verb -> other"
};

// Both models: predictor + concreteness + category + predictor x category +
// concreteness x category, first category present as reference. Needs at
// least 20 words. Categories with fewer than 3 words are folded into
// "other" (or "other" into the largest category) with a warning.
AoaComparison aoa_regressions(std::vector<AoaWordRow> rows);

}  // namespace childlm::aoa
