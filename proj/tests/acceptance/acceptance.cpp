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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "childlm/analysis/lasso.hpp"
#include "childlm/analysis/ols.hpp"
#include "childlm/aoa/aoa.hpp"
#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/common/stats.hpp"
#include "childlm/corpus/sampling.hpp"
#include "childlm/corpus/tokenize.hpp"
#include "childlm/corpus/transcript.hpp"
#include "childlm/eval/harness.hpp"
#include "childlm/features/features.hpp"
#include "childlm/learners/ngram.hpp"
#include "childlm/pipeline/demo.hpp"
#include "childlm/synth/generator.hpp"
#include "testing.hpp"

namespace fs = std::filesystem;
using namespace childlm;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "NOT ") + what);
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. parse -> serialize -> parse fixed point.
Outcome format_round_trip() {
  Outcome o;
  const auto t0 = Clock::now();
  synth::Generator gen(11);
  const auto fams = synth::Generator::families(4, 3);
  std::vector<corpus::Conversation> convs;
  for (int i = 0; i < 1000; ++i) convs.push_back(gen.conversation(fams[i % 4], 1000 + i));
  testing::TempDir dir("accept-format");
  for (auto layout : {corpus::TranscriptLayout::kSingleLine, corpus::TranscriptLayout::kBlankLine}) {
    std::ostringstream first;
    corpus::write_transcripts(first, convs, layout);
    write_file_atomic(dir / "a.txt", first.str());
    corpus::TranscriptOptions opts;
    opts.layout = layout;
    const auto parsed = corpus::read_transcript_file(dir / "a.txt", opts);
    std::ostringstream second;
    corpus::write_transcripts(second, parsed.conversations, layout);
    write_file_atomic(dir / "b.txt", second.str());
    const auto again = corpus::read_transcript_file(dir / "b.txt", opts);
    std::ostringstream third;
    corpus::write_transcripts(third, again.conversations, layout);
    std::size_t diffs = 0;
    if (parsed.conversations.size() != 1000 || again.conversations.size() != 1000) ++diffs;
    for (std::size_t i = 0; i < std::min(parsed.conversations.size(), again.conversations.size()); ++i) {
      const auto& a = parsed.conversations[i].utterances;
      const auto& b = again.conversations[i].utterances;
      if (a.size() != b.size()) {
        ++diffs;
        continue;
      }
      for (std::size_t u = 0; u < a.size(); ++u) {
        if (a[u].label != b[u].label || a[u].text != b[u].text || a[u].tokens != b[u].tokens) ++diffs;
      }
    }
    if (second.str() != third.str()) ++diffs;
    if (!parsed.errors.empty()) ++diffs;
    o.expect(diffs == 0, fmt::format("{} diffs ({})", diffs,
                                     layout == corpus::TranscriptLayout::kSingleLine ? "single_line"
                                                                                      : "blank_line"));
  }
  const double s = seconds_since(t0);
  o.expect(s < 5.0, fmt::format("{:.2f} s < 5 s", s));
  return o;
}

// 2. Sum over the predictable vocabulary for 50 contexts.
Outcome kn_normalization() {
  Outcome o;
  synth::Generator gen(12);
  const auto d = gen.dataset(synth::FamilyProfile{}, 50000, 5);
  std::vector<std::string> stream;
  for (const auto& c : d.conversations()) {
    for (const auto& u : c.utterances) {
      stream.emplace_back(learners::kBos);
      stream.insert(stream.end(), u.tokens.begin(), u.tokens.end());
    }
  }
  Rng rng(6);
  double worst = 0;
  for (int order : {3, 4}) {
    const auto model = learners::NgramModel::train(d, {.order = order});
    const auto vocab = model.predictable_vocabulary();
    for (int i = 0; i < 50; ++i) {
      std::vector<std::string> ctx;
      if (i % 10 == 9) {
        // An unseen context.
        ctx = {"zzq", "qqz", "xqz"};
        ctx.resize(order - 1);
      } else {
        const std::size_t pos = 1 + rng.index(stream.size() - order);
        ctx.assign(stream.begin() + pos, stream.begin() + pos + order - 1);
      }
      double sum = 0;
      for (const auto& w : vocab) sum += model.prob(ctx, w);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  o.expect(d.token_count() >= 50000, fmt::format("{} tokens", d.token_count()));
  o.expect(worst <= 1e-9, fmt::format("max |sum - 1| = {:.2e} over 50 contexts x orders 3,4", worst));
  return o;
}

// 3. Held-out NLL falls with training size; planted scaling interaction.
Outcome size_scaling() {
  Outcome o;
  synth::Generator gen(13);
  synth::FamilyProfile fam;
  const auto held = gen.dataset(fam, 20000, 999);
  const std::vector<std::size_t> sizes = {10000, 40000, 160000};
  std::vector<double> nll(sizes.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      const auto train = gen.dataset(fam, sizes[s], seed * 100 + s);
      const auto model = learners::NgramModel::train(train, {.order = 3});
      double lp = 0, n = 0;
      for (const auto& c : held.conversations()) {
        for (const auto& u : c.utterances) {
          lp += model.sequence_logprob(u.tokens);
          n += static_cast<double>(u.tokens.size() + 1);
        }
      }
      nll[s] += -lp / n / 5.0;
    }
  }
  o.expect(nll[0] > nll[1] && nll[1] > nll[2],
           fmt::format("held-out NLL {:.4f} > {:.4f} > {:.4f}", nll[0], nll[1], nll[2]));

  Rng rng(14);
  std::vector<analysis::ScalingPoint> pts;
  for (int i = 0; i < 10; ++i) {
    const double tokens = std::pow(10.0, 3.0 + 0.3 * i);
    pts.push_back({"a", tokens, 1.0 + 5 * std::log10(tokens) + 0.1 * rng.normal()});
    pts.push_back({"b", tokens, 2.0 + 9 * std::log10(tokens) + 0.1 * rng.normal()});
  }
  const auto fit = analysis::scaling_fit(pts);
  const auto& it = fit.interactions.at(0);
  o.expect(std::abs(it.estimate - 4.0) <= 0.5 && it.p_value < 0.01,
           fmt::format("interaction {:.4f} (p = {:.2e})", it.estimate, it.p_value));
  return o;
}

eval::MinimalPairItem pair_item(const std::string& id, const std::string& good, const std::string& bad,
                                const std::string& subtask) {
  return {id, "zorro", subtask, corpus::tokenize(good), corpus::tokenize(bad)};
}

// 4. Minimal-pair harness.
Outcome minimal_pairs() {
  Outcome o;
  // Good and bad sentences of equal length tie under the uniform learner.
  std::vector<eval::MinimalPairItem> ties;
  for (int i = 0; i < 40; ++i) {
    ties.push_back(pair_item("t" + std::to_string(i), "the dog runs", "the dog run", i % 2 ? "a" : "b"));
  }
  const auto u = eval::score_minimal_pairs(learners::UniformScorer(500), ties, "zorro");
  o.expect(u.value == 50.0, fmt::format("uniform {}", format_number(*u.value)));

  const std::vector<std::string> nouns = {"dog", "cat", "bird", "cow", "duck",
                                          "frog", "pig", "fish", "bear", "fox"};
  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"runs", "run"}, {"jumps", "jump"}, {"sleeps", "sleep"}, {"eats", "eat"}};
  std::vector<corpus::Conversation> convs;
  std::vector<eval::MinimalPairItem> agree;
  // Sentences repeat 1-3 times so every count-of-counts class is populated.
  std::size_t k = 0;
  for (const auto& n : nouns) {
    for (const auto& [sg, pl] : verbs) {
      for (std::size_t r = 0; r <= k++ % 3; ++r) {
        convs.push_back(testing::conversation({{"MOT", "the " + n + " " + sg}, {"MOT", "the " + n + "s " + pl}}));
      }
      const std::string id = n + "-" + sg;
      agree.push_back(pair_item(id + "-sg", "the " + n + " " + sg, "the " + n + " " + pl, "singular"));
      agree.push_back(pair_item(id + "-pl", "the " + n + "s " + pl, "the " + n + "s " + sg, "plural"));
    }
  }
  const auto model = learners::NgramModel::train(corpus::Dataset("agree", convs), {.order = 2});
  const auto b = eval::score_minimal_pairs(model, agree, "zorro");
  o.expect(*b.value >= 90.0, fmt::format("order-2 {} on {} items", format_number(*b.value), agree.size()));

  corpus::Vocabulary vocab = {{"the", 1}, {"dog", 1}, {"runs", 1}, {"run", 1}};
  std::vector<eval::MinimalPairItem> items;
  std::set<std::string> planted;
  for (int i = 0; i < 20; ++i) {
    const bool oov = i % 6 == 1;
    const std::string id = "p" + std::to_string(i);
    if (oov) planted.insert(id);
    items.push_back(pair_item(id, oov ? "the wug runs" : "the dog runs", "the dog run", "s"));
  }
  const auto kept = eval::vocab_filter(items, vocab);
  std::set<std::string> dropped;
  for (const auto& it : items) dropped.insert(it.id);
  for (const auto& k : kept) dropped.erase(k.id);
  o.expect(dropped == planted, fmt::format("dropped {} of {} planted OOV items", dropped.size(), planted.size()));
  return o;
}

// Rank formula written directly: average of the 1-based positions a value
// would occupy, then Pearson of the ranks.
double direct_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        less += w < v[i];
        equal += w == v[i];
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// 5. Spearman with ties.
Outcome spearman_oracle() {
  Outcome o;
  Rng rng(15);
  double worst = 0;
  std::size_t with_ties = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 5 + rng.index(60);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.index(8));
      y[i] = rep % 2 ? rng.normal() : static_cast<double>(rng.index(5));
    }
    if (std::set(x.begin(), x.end()).size() < n) ++with_ties;
    const auto got = spearman(x, y);
    if (!got) {
      worst = INFINITY;
      continue;
    }
    worst = std::max(worst, std::abs(*got - direct_spearman(x, y)));
  }
  o.expect(worst <= 1e-12, fmt::format("max deviation {:.1e} over 100 vectors ({} with ties)", worst, with_ties));
  return o;
}

Eigen::MatrixXd standardized(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (Eigen::Index j = 0; j < p; ++j) {
    x.col(j).array() -= x.col(j).mean();
    x.col(j) /= std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n));
  }
  return x;
}

// 6. Lasso.
Outcome lasso_oracle() {
  Outcome o;
  Eigen::MatrixXd x1(4, 1);
  x1 << 1, -1, 1, -1;
  const Eigen::VectorXd y1 = 0.8 * x1.col(0);
  const auto f1 = analysis::lasso_fit(x1, y1, 0.3);
  double best = 0, best_obj = INFINITY;
  for (int i = -20000; i <= 20000; ++i) {
    const double b = i * 1e-4;
    const double obj = (y1 - b * x1.col(0)).squaredNorm() / 8 + 0.3 * std::abs(b);
    if (obj < best_obj) {
      best_obj = obj;
      best = b;
    }
  }
  o.expect(std::abs(f1.beta(0) - 0.5) <= 1e-6 && std::abs(best - 0.5) <= 1e-4 &&
               analysis::soft_threshold(0.8, 0.3) == 0.5,
           fmt::format("beta {:.8f}, grid {:.4f}", f1.beta(0), best));

  const auto x = standardized(25, 175, 16);
  Rng rng(17);
  Eigen::VectorXd y(25);
  for (Eigen::Index i = 0; i < 25; ++i) y(i) = 1.5 * x(i, 2) - x(i, 40) + 0.5 * rng.normal();
  const double amax = analysis::lasso_alpha_max(x, y);
  const bool zeros = analysis::lasso_fit(x, y, amax).beta.isZero() &&
                     analysis::lasso_fit(x, y, 3 * amax).beta.isZero();
  o.expect(zeros, "all-zero at alpha >= alpha_max");
  double worst = 0;
  for (double ratio : analysis::lasso_alpha_grid(amax, 12, 1e-2, 1.0)) {
    const auto fit = analysis::lasso_fit(x, y, ratio);
    worst = std::max(worst, analysis::lasso_kkt_residual(x, y, fit, ratio));
  }
  o.expect(worst < 1e-5, fmt::format("max KKT residual {:.2e} on 25x175 over 12 alphas", worst));
  return o;
}

// 7. Feature oracles.
Outcome feature_oracles() {
  Outcome o;
  auto one = [](const std::string& text) {
    return corpus::Dataset("d", {testing::conversation({{"MOT", text}})});
  };
  // Pair distribution enumerated directly, marginals over first and second slots.
  const std::vector<std::string> t = {"a", "b", "a", "b", "a", "b"};
  std::map<std::pair<std::string, std::string>, double> pxy;
  std::map<std::string, double> px, py;
  const double np = static_cast<double>(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    pxy[{t[i], t[i + 1]}] += 1 / np;
    px[t[i]] += 1 / np;
    py[t[i + 1]] += 1 / np;
  }
  double oracle = 0;
  for (const auto& [xy, p] : pxy) oracle += p * std::log2(p / (px[xy.first] * py[xy.second]));
  const double mi = *features::lexical_features(one("a b a b a b")).get("bigram_mutual_information");
  o.expect(std::abs(mi - oracle) <= 1e-12, fmt::format("MI {:.9f} equals pair oracle {:.9f}", mi, oracle));
  o.expect(std::abs(mi - 1.0) <= 1e-9, fmt::format("MI {:.9f} = 1.0 +- 1e-9", mi));

  const auto p = one("a a b c");
  const corpus::Dataset twins[] = {p, p.renamed("twin")};
  const double kl = *features::divergence_features(p, twins).get("mean_kl_from_others");
  const std::vector<double> dist = {0.5, 0.25, 0.25};
  double brute_kl = 0;
  for (double v : dist) brute_kl += v * std::log2(v / v);
  o.expect(kl == 0.0 && brute_kl == 0.0 && features::kl_divergence_bits(dist, dist) == 0.0,
           fmt::format("KL(identical) {}", format_number(kl)));

  const double hapax = *features::lexical_features(one("a a b")).get("hapax_ratio");
  o.expect(hapax == 0.5, fmt::format("hapax {}", format_number(hapax)));

  features::PosTagger nouns({{"a", features::PosTag::kNoun}}, {});
  const auto d = one("a a a a a a");
  const auto tagged = features::tag_dataset(d, nouns);
  std::map<std::string, double> counts;
  double total = 0;
  for (const auto& conv : tagged) {
    for (const auto& u : conv) {
      for (std::size_t i = 0; i + 1 < u.tags.size(); ++i) {
        counts[std::string(features::tag_name(u.tags[i])) + std::string(features::tag_name(u.tags[i + 1]))] += 1;
        total += 1;
      }
    }
  }
  double brute_h = 0;
  for (const auto& [k, c] : counts) brute_h -= c / total * std::log2(c / total);
  const double h = *features::syntactic_features(d, tagged).get("pos_bigram_entropy");
  o.expect(h == 0.0 && std::abs(brute_h) == 0.0, fmt::format("POS bigram entropy {}", format_number(h)));
  return o;
}

// 8. AoA recovery.
Outcome aoa_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(18);
  int within = 0, converged = 0;
  double worst_gradient = 0;
  for (int i = 0; i < 50; ++i) {
    const double b_age = rng.uniform(0.2, 0.45);
    const double truth = rng.uniform(16, 28);
    aoa::CdiWord w{"w" + std::to_string(i), aoa::LexicalCategory::kNoun, 3.0,
                   pipeline::simulate_cdi_observations(-truth * b_age, b_age, 500, 8, 36,
                                                       derive_seed(19, "word" + std::to_string(i)))};
    const auto e = aoa::fit_aoa(w);
    if (e.converged) {
      ++converged;
      worst_gradient = std::max(worst_gradient, e.gradient_norm);
    }
    if (e.aoa_months && std::abs(*e.aoa_months - truth) <= 1.0) ++within;
  }
  o.expect(within >= 48, fmt::format("{}/50 within 1 month", within));

  aoa::CdiWord analytic{"analytic", aoa::LexicalCategory::kNoun, 3.0, {}};
  for (int age = 12; age <= 30; ++age) {
    const long n = 100000;
    const long k = std::lround(n / (1 + std::exp(-(-6 + 0.3 * age))));
    analytic.observations.push_back({static_cast<double>(age), k, n});
  }
  const auto a = aoa::fit_aoa(analytic);
  if (a.converged) {
    ++converged;
    worst_gradient = std::max(worst_gradient, a.gradient_norm);
  }
  o.expect(a.aoa_months && std::abs(*a.aoa_months - 20.0) <= 0.5,
           fmt::format("analytic AoA {:.4f}", a.aoa_months.value_or(NAN)));
  o.expect(worst_gradient < 1e-6, fmt::format("max gradient {:.1e} over {} converged fits", worst_gradient, converged));
  const double s = seconds_since(t0);
  o.expect(s < 30, fmt::format("{:.2f} s < 30 s", s));
  return o;
}

// 9. AIC discipline.
Outcome aic_discipline() {
  Outcome o;
  Rng rng(20);
  const int n = 100, reps = 2000;
  double worst = 0, mean_delta = 0, mean_gain = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd x0(n, 2), x1(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const double f = rng.normal();
      x0.row(i) << 1, f;
      x1.row(i) << 1, f, rng.normal();
      y(i) = 0.5 + 2 * f + rng.normal();
    }
    const auto m0 = analysis::ols(x0, y, {"intercept", "f"});
    const auto m1 = analysis::ols(x1, y, {"intercept", "f", "noise"});
    const double gain = -n * std::log(m1.rss / m0.rss);
    const double delta = m1.aic - m0.aic;
    worst = std::max(worst, std::abs(delta - (2.0 - gain)));
    mean_delta += delta / reps;
    mean_gain += gain / reps;
  }
  o.expect(worst < 1e-9, fmt::format("delta AIC = 2 - fit gain to {:.1e}", worst));
  // The fit gain of a noise column is about chi-square(1) in the large-n limit.
  o.expect(std::abs(mean_gain - 1.0) < 0.15 && std::abs(mean_delta - 1.0) < 0.15,
           fmt::format("mean delta {:.3f}, mean gain {:.3f}", mean_delta, mean_gain));

  std::vector<aoa::AoaWordRow> rows;
  const aoa::LexicalCategory cats[] = {aoa::LexicalCategory::kNoun, aoa::LexicalCategory::kVerb,
                                       aoa::LexicalCategory::kAdjective};
  for (int i = 0; i < 60; ++i) {
    aoa::AoaWordRow r;
    r.word = "w" + std::to_string(i);
    r.category = cats[i % 3];
    r.concreteness = rng.uniform(1, 5);
    r.log_frequency = rng.uniform(0, 8);
    r.aoa_months = 30 - 1.5 * r.log_frequency + rng.normal();
    r.mean_nll = -r.log_frequency;
    rows.push_back(r);
  }
  const auto cmp = aoa::aoa_regressions(rows);
  o.expect(std::abs(cmp.base.aic - cmp.nll.aic) < 1e-9,
           fmt::format("affine fixture |AIC difference| {:.1e}", std::abs(cmp.base.aic - cmp.nll.aic)));
  return o;
}

std::map<std::string, std::uint64_t> hash_tree(const fs::path& root) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = fnv1a64(read_text_file(e.path()));
  }
  return out;
}

// 10. Two full CLI runs with one config.
Outcome end_to_end() {
  Outcome o;
  const auto t0 = Clock::now();
  testing::TempDir dir("accept-e2e");
  const std::string cli = testing::quote(CHILDLM_CLI);
  auto sh = [&](const std::string& args) {
    const auto r = testing::run_command(cli + " -q " + args);
    if (r.exit_code != 0) throw std::runtime_error(fmt::format("`childlm {}` failed: {}", args, r.output));
  };
  sh("demo " + testing::quote(dir.path()) + " --families 3 --series-tokens 0");
  const std::string cfg = " -c " + testing::quote(dir / "config.json") +
                          " --set conditions.all_families=false --set 'conditions.mixtures=[]'";
  std::vector<std::map<std::string, std::uint64_t>> trees;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(dir / "out");
    for (const char* step : {"ingest", "run", "features", "analyze"}) sh(step + cfg);
    trees.push_back(hash_tree(dir / "out"));
  }
  const auto records = read_csv_file(dir / "out" / "records.csv");
  std::set<std::string> datasets;
  std::map<std::string, std::set<std::string>> seeds;
  for (const auto& r : records.rows) {
    datasets.insert(r[records.require_column("dataset")]);
    seeds[r[records.require_column("dataset")] + "/" + r[records.require_column("model")]].insert(
        r[records.require_column("seed")]);
  }
  bool five = !seeds.empty();
  for (const auto& [k, s] : seeds) five = five && s.size() == 5;
  o.expect(datasets.size() == 3 && five, fmt::format("{} conditions x 5 seeds, {} records", datasets.size(),
                                                     records.rows.size()));
  std::size_t mismatched = 0;
  for (const auto& [file, h] : trees[0]) {
    const auto it = trees[1].find(file);
    if (it == trees[1].end() || it->second != h) ++mismatched;
  }
  if (trees[0].size() != trees[1].size()) ++mismatched;
  o.expect(mismatched == 0, fmt::format("{} files, {} mismatched", trees[0].size(), mismatched));
  const double s = seconds_since(t0);
  o.expect(s < 600, fmt::format("{:.1f} s < 600 s", s));
  return o;
}

}  // namespace

int main() {
  set_min_log_level(LogLevel::kError);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"transcript round trip", format_round_trip},
      {"KN normalization", kn_normalization},
      {"size scaling", size_scaling},
      {"minimal-pair harness", minimal_pairs},
      {"Spearman oracle", spearman_oracle},
      {"lasso oracle", lasso_oracle},
      {"feature oracles", feature_oracles},
      {"AoA recovery", aoa_recovery},
      {"AIC discipline", aic_discipline},
      {"end-to-end determinism", end_to_end}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::string notes;
    for (const auto& n : o.notes) notes += (notes.empty() ? "" : "; ") + n;
    fmt::print("{} {:2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, notes);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
