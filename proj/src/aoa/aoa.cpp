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

#include "childlm/aoa/aoa.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/parallel.hpp"
#include "childlm/common/stats.hpp"
#include "childlm/corpus/tokenize.hpp"

namespace childlm::aoa {
namespace {

constexpr std::array<std::string_view, 5> kCategoryNames = {"noun", "verb", "adjective",
                                                             "function_word", "other"};

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view category_name(LexicalCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<LexicalCategory> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<LexicalCategory>(i);
  }
  return std::nullopt;
}

std::vector<CdiWord> read_cdi_csv(const std::filesystem::path& path) {
  const auto table = read_csv_file(path);
  const auto c_word = table.require_column("word");
  const auto c_cat = table.require_column("lexical_category");
  const auto c_conc = table.require_column("concreteness");
  const auto c_age = table.require_column("age_months");
  const auto c_prod = table.require_column("n_producing");
  const auto c_total = table.require_column("n_total");
  std::vector<CdiWord> words;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto fail = [&](std::string_view what) {
      return UserError(fmt::format("{}: CDI row {}: {}", path.string(), r + 1, what));
    };
    if (row.size() != table.header.size()) throw fail("wrong number of fields");
    const auto cat = parse_category(trim(row[c_cat]));
    if (!cat) throw fail(fmt::format("unknown lexical_category '{}'", row[c_cat]));
    const auto conc = parse_double(trim(row[c_conc]));
    const auto age = parse_double(trim(row[c_age]));
    const auto prod = parse_double(trim(row[c_prod]));
    const auto total = parse_double(trim(row[c_total]));
    if (!conc || !age || !prod || !total) throw fail("numeric field is not a finite number");
    if (*age <= 0) throw fail("age_months must be positive");
    if (*prod != std::floor(*prod) || *total != std::floor(*total) || *prod < 0 || *prod > *total) {
      throw fail("need integers 0 <= n_producing <= n_total");
    }
    const std::string word = trim(row[c_word]);
    auto [it, fresh] = index.emplace(word, words.size());
    if (fresh) words.push_back({word, *cat, *conc, {}});
    auto& w = words[it->second];
    if (w.category != *cat || w.concreteness != *conc) {
      throw fail(fmt::format("word '{}' has conflicting category or concreteness", word));
    }
    w.observations.push_back({*age, static_cast<long>(*prod), static_cast<long>(*total)});
  }
  return words;
}

void write_cdi_csv(const std::filesystem::path& path, const std::vector<CdiWord>& words,
                   const std::string& provenance) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.comment(provenance);
  csv.row({"word", "lexical_category", "concreteness", "age_months", "n_producing", "n_total"});
  for (const auto& w : words) {
    for (const auto& o : w.observations) {
      csv.row({w.word, std::string(category_name(w.category)), format_number(w.concreteness),
               format_number(o.age_months), std::to_string(o.n_producing),
               std::to_string(o.n_total)});
    }
  }
  write_file_atomic(path, out.str());
}

AoaEstimate fit_aoa(const CdiWord& w, const AoaPriors& priors, int max_iterations,
                    double tolerance) {
  std::set<double> ages;
  for (const auto& o : w.observations) {
    if (o.n_total > 0) ages.insert(o.age_months);
  }
  if (ages.size() < 2) {
    throw std::invalid_argument(
        fmt::format("word '{}' needs observations at 2 or more ages", w.word));
  }
  const Eigen::Vector2d mean(priors.intercept_mean, priors.slope_mean);
  const Eigen::Vector2d precision(1.0 / (priors.intercept_sd * priors.intercept_sd),
                                  1.0 / (priors.slope_sd * priors.slope_sd));
  auto log_posterior = [&](const Eigen::Vector2d& b) {
    double lp = 0.0;
    for (const auto& o : w.observations) {
      const double eta = b(0) + b(1) * o.age_months;
      lp += static_cast<double>(o.n_producing) * eta - static_cast<double>(o.n_total) * softplus(eta);
    }
    return lp - 0.5 * (precision.array() * (b - mean).array().square()).sum();
  };
  auto gradient_hessian = [&](const Eigen::Vector2d& b, Eigen::Vector2d& g, Eigen::Matrix2d& h) {
    g = -(precision.array() * (b - mean).array()).matrix();
    h = -precision.asDiagonal().toDenseMatrix();
    for (const auto& o : w.observations) {
      const Eigen::Vector2d x(1.0, o.age_months);
      const double p = sigmoid(b(0) + b(1) * o.age_months);
      g += (static_cast<double>(o.n_producing) - static_cast<double>(o.n_total) * p) * x;
      h -= static_cast<double>(o.n_total) * p * (1 - p) * x * x.transpose();
    }
  };

  AoaEstimate est;
  est.word = w.word;
  Eigen::Vector2d b = mean;
  Eigen::Vector2d g;
  Eigen::Matrix2d h;
  double current = log_posterior(b);
  for (int it = 1; it <= max_iterations; ++it) {
    gradient_hessian(b, g, h);
    Eigen::Vector2d step = -h.ldlt().solve(g);
    // The posterior is strictly concave; halve until it does not decrease
    // beyond rounding noise in the sum.
    const double slack = 1e-12 * (1.0 + std::abs(current));
    double next = log_posterior(b + step);
    for (int halvings = 0; next < current - slack && halvings < 60; ++halvings) {
      step *= 0.5;
      next = log_posterior(b + step);
    }
    b += step;
    current = next;
    est.iterations = it;
    if (step.cwiseAbs().maxCoeff() < tolerance) {
      est.converged = true;
      break;
    }
  }
  gradient_hessian(b, g, h);
  est.gradient_norm = g.norm();
  est.b_intercept = b(0);
  est.b_age = b(1);
  est.defined = est.converged && b(1) > 0;
  if (est.defined) est.aoa_months = -b(0) / b(1);
  return est;
}

namespace {

std::size_t word_count(const corpus::Utterance& u) {
  std::size_t n = 0;
  for (const auto& t : u.tokens) {
    if (!corpus::is_punctuation(t)) ++n;
  }
  return n;
}

void bisect(const std::vector<std::size_t>& words, std::size_t conversation, std::size_t begin,
            std::size_t end, std::size_t max_words, std::vector<Chunk>& out) {
  std::size_t total = 0;
  for (std::size_t i = begin; i < end; ++i) total += words[i];
  if (total <= max_words || end - begin == 1) {
    out.push_back({conversation, begin, end, total, total > max_words});
    return;
  }
  std::size_t best = begin + 1;
  double best_gap = -1;
  std::size_t prefix = 0;
  for (std::size_t cut = begin + 1; cut < end; ++cut) {
    prefix += words[cut - 1];
    const double gap = std::abs(static_cast<double>(prefix) - static_cast<double>(total) / 2.0);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best = cut;
    }
  }
  bisect(words, conversation, begin, best, max_words, out);
  bisect(words, conversation, best, end, max_words, out);
}

}  // namespace

std::vector<Chunk> chunk_conversation(const corpus::Conversation& c, std::size_t conversation,
                                      std::size_t max_words) {
  if (max_words == 0) throw std::invalid_argument("chunk size must be positive");
  std::vector<Chunk> out;
  if (c.utterances.empty()) return out;
  std::vector<std::size_t> words;
  for (const auto& u : c.utterances) words.push_back(word_count(u));
  bisect(words, conversation, 0, words.size(), max_words, out);
  return out;
}

std::map<std::string, NllSummary> word_mean_nll(const learners::Scorer& scorer,
                                                const corpus::Dataset& d,
                                                const std::set<std::string>& lexicon,
                                                std::size_t max_words, int workers) {
  if (!scorer.has_token_nlls()) {
    throw UserError(fmt::format("{} does not provide per-token NLLs", scorer.name()));
  }
  std::vector<Chunk> chunks;
  for (std::size_t ci = 0; ci < d.conversations().size(); ++ci) {
    const auto cs = chunk_conversation(d.conversations()[ci], ci, max_words);
    for (const auto& ch : cs) {
      if (ch.oversized) {
        log_warning(fmt::format("conversation {} has a {}-word utterance; scored as its own chunk",
                                ci, ch.words));
      }
    }
    chunks.insert(chunks.end(), cs.begin(), cs.end());
  }
  // Per chunk: (word, nll) pairs for lexicon words.
  std::vector<std::vector<std::pair<std::string, double>>> hits(chunks.size());
  std::vector<std::size_t> chunk_index_in_conv(chunks.size());
  for (std::size_t i = 0, j = 0; i < chunks.size(); ++i) {
    j = (i > 0 && chunks[i].conversation == chunks[i - 1].conversation) ? j + 1 : 0;
    chunk_index_in_conv[i] = j;
  }
  parallel_for(chunks.size(), workers, [&](std::size_t i) {
    const auto& ch = chunks[i];
    const auto& conv = d.conversations()[ch.conversation];
    std::vector<learners::TokenSeq> utts;
    for (std::size_t u = ch.begin; u < ch.end; ++u) {
      if (!conv.utterances[u].tokens.empty()) utts.push_back(conv.utterances[u].tokens);
    }
    if (utts.empty()) return;
    const auto s = scorer.score(learners::chunk_item_id(ch.conversation, chunk_index_in_conv[i]),
                                utts);
    std::size_t k = 0;
    for (const auto& u : utts) {
      for (const auto& t : u) {
        if (k >= s.token_nlls.size()) {
          throw UserError(fmt::format("{} returned too few token NLLs", scorer.name()));
        }
        if (lexicon.contains(t)) hits[i].emplace_back(t, s.token_nlls[k]);
        ++k;
      }
    }
  });
  std::map<std::string, std::vector<double>> values;
  for (const auto& h : hits) {
    for (const auto& [w, v] : h) values[w].push_back(v);
  }
  std::map<std::string, NllSummary> out;
  for (auto& [w, v] : values) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    out[w] = {w, sum / static_cast<double>(v.size()), v.size()};
  }
  return out;
}

namespace {

analysis::OlsResult fit_outcome_model(const std::vector<AoaWordRow>& rows,
                                      const std::vector<LexicalCategory>& cats, bool use_nll) {
  const std::string pred = use_nll ? "mean_nll" : "log_frequency";
  std::vector<std::string> names = {"intercept", pred, "concreteness"};
  for (std::size_t c = 1; c < cats.size(); ++c) names.emplace_back(category_name(cats[c]));
  for (std::size_t c = 1; c < cats.size(); ++c) {
    names.push_back(pred + ":" + std::string(category_name(cats[c])));
  }
  for (std::size_t c = 1; c < cats.size(); ++c) {
    names.push_back("concreteness:" + std::string(category_name(cats[c])));
  }
  const std::size_t extra = cats.size() - 1;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(names.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double v = use_nll ? rows[i].mean_nll : rows[i].log_frequency;
    x(r, 0) = 1.0;
    x(r, 1) = v;
    x(r, 2) = rows[i].concreteness;
    const auto c = static_cast<std::size_t>(
        std::find(cats.begin(), cats.end(), rows[i].category) - cats.begin());
    if (c > 0) {
      x(r, static_cast<Eigen::Index>(2 + c)) = 1.0;
      x(r, static_cast<Eigen::Index>(2 + extra + c)) = v;
      x(r, static_cast<Eigen::Index>(2 + 2 * extra + c)) = rows[i].concreteness;
    }
    y(r) = rows[i].aoa_months;
  }
  return analysis::ols(x, y, names);
}

}  // namespace

AoaComparison aoa_regressions(std::vector<AoaWordRow> rows) {
  if (rows.size() < 20) {
    throw std::invalid_argument(fmt::format(
        "AoA regressions need at least 20 words with every covariate, got {}", rows.size()));
  }
  for (const auto& r : rows) {
    if (!std::isfinite(r.aoa_months) || !std::isfinite(r.log_frequency) ||
        !std::isfinite(r.mean_nll) || !std::isfinite(r.concreteness)) {
      throw std::invalid_argument(fmt::format("word '{}' has a non-finite covariate", r.word));
    }
  }
  AoaComparison cmp;
  // Each category carries its own intercept, predictor and concreteness
  // slope, so it needs at least 3 words.
  for (;;) {
    std::map<LexicalCategory, std::size_t> counts;
    for (const auto& r : rows) counts[r.category] += 1;
    if (counts.size() < 2) break;
    std::optional<LexicalCategory> small;
    for (const auto& [c, n] : counts) {
      if (n < 3) {
        small = c;
        break;
      }
    }
    if (!small) break;
    LexicalCategory target = LexicalCategory::kOther;
    if (*small == LexicalCategory::kOther) {
      std::size_t best = 0;
      for (const auto& [c, n] : counts) {
        if (c != LexicalCategory::kOther && n > best) {
          best = n;
          target = c;
        }
      }
    }
    const auto merge = fmt::format("{} -> {}", category_name(*small), category_name(target));
    log_warning(fmt::format("AoA regressions: category '{}' has {} words; merged ({})",
                            category_name(*small), counts[*small], merge));
    cmp.category_merges.push_back(merge);
    for (auto& r : rows) {
      if (r.category == *small) r.category = target;
    }
  }
  std::vector<LexicalCategory> cats;
  for (const auto& r : rows) {
    if (std::find(cats.begin(), cats.end(), r.category) == cats.end()) cats.push_back(r.category);
  }
  std::sort(cats.begin(), cats.end());
  cmp.base = fit_outcome_model(rows, cats, false);
  cmp.nll = fit_outcome_model(rows, cats, true);
  cmp.delta_aic = cmp.nll.aic - cmp.base.aic;
  cmp.n_words = rows.size();
  std::vector<double> lf, nll;
  for (const auto& r : rows) {
    lf.push_back(r.log_frequency);
    nll.push_back(r.mean_nll);
  }
  cmp.r_logfreq_nll = pearson(lf, nll);
  return cmp;
}

}  // namespace childlm::aoa
