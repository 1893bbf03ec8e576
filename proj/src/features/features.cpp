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

#include "childlm/features/features.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "childlm/common/io.hpp"
#include "childlm/common/stats.hpp"
#include "childlm/corpus/tokenize.hpp"
#include "json.hpp"

namespace childlm::features {
namespace {

std::vector<FeatureInfo> build_catalog() {
  std::vector<FeatureInfo> c = {
      {"token_count", "lexical", "total tokens"},
      {"conversation_count", "lexical", "number of conversations"},
      {"ttr", "lexical", "types / tokens"},
      {"mattr", "lexical",
       "mean TTR over sliding windows (default 50 tokens) inside each conversation; a shorter "
       "conversation is one window; corpus shorter than the window gives ttr"},
      {"unigram_entropy", "lexical", "-sum p(w) log2 p(w), MLE"},
      {"trigram_entropy", "lexical", "entropy (bits) of within-utterance trigrams, MLE"},
      {"hapax_ratio", "lexical", "types seen once / types"},
      {"zipf_slope", "lexical", "OLS slope of log freq on log rank, top 1000 types"},
      {"frequency_skewness", "lexical", "standardized third moment of type counts"},
      {"bigram_mutual_information", "lexical",
       "sum p(x,y) log2 p(x,y)/(p(x)p(y)) over adjacent within-utterance pairs; marginals from "
       "the pair positions"},
  };
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    std::string tag(tag_name(static_cast<PosTag>(i)));
    std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char ch) {
      return static_cast<char>(std::tolower(ch));
    });
    c.push_back({"pos_prop_" + tag, "syntactic", "share of tokens tagged " +
                                                     std::string(tag_name(static_cast<PosTag>(i)))});
  }
  const std::vector<FeatureInfo> rest = {
      {"pos_bigram_entropy", "syntactic", "entropy (bits) of adjacent tag pairs"},
      {"pos_bigram_diversity", "syntactic", "distinct tag pairs / 144"},
      {"caregiver_pos_token_count", "syntactic", "non-X tokens in MOT/FAT utterances"},
      {"child_pos_token_count", "syntactic", "non-X tokens in CHI utterances"},
      {"total_parse_eligible", "syntactic", "utterances with a word and at most half X tags"},
      {"turns_per_conversation", "conversational", "mean number of same-speaker runs"},
      {"speaker_switch_rate", "conversational",
       "adjacent utterance pairs with different speakers / adjacent pairs"},
      {"question_rate", "conversational", "utterances ending in '?' / utterances"},
      {"wh_question_rate", "conversational", "questions opening with a wh-word / utterances"},
      {"caregiver_token_share", "conversational", "caregiver tokens / (caregiver + child)"},
      {"child_token_share", "conversational", "child tokens / (caregiver + child)"},
      {"expansion_rate", "conversational",
       "caregiver utterances right after a CHI utterance whose word set contains the child's "
       "word set / such utterances"},
      {"mean_kl_from_others", "divergence", "mean KL(p_d || p_q) in bits, add-0.5 unigrams"},
      {"mean_js_from_others", "divergence", "mean Jensen-Shannon divergence in bits"},
      {"adjacent_turn_similarity", "semantic",
       "mean cosine of mean word vectors over adjacent different-speaker utterances"},
      {"child_to_caregiver_semantic_pair_count", "semantic",
       "CHI -> caregiver adjacencies where both utterances have a vector"},
      {"unintelligible_rate", "quality", "unintelligible markers / tokens"},
      {"partial_word_rate", "quality", "tokens ending in '-' / tokens"},
      {"non_linguistic_rate", "quality", "non-linguistic markers / tokens"},
      {"n_families", "mixture", "distinct family ids"},
      {"age_mean", "mixture", "mean child age (months) over conversations with an age"},
      {"age_sd", "mixture", "population sd of child age"},
      {"age_min", "mixture", "minimum child age"},
      {"age_max", "mixture", "maximum child age"},
      {"age_range", "mixture", "age_max - age_min"},
  };
  c.insert(c.end(), rest.begin(), rest.end());
  return c;
}

double entropy_bits(const std::unordered_map<std::string, double>& counts, double total) {
  double h = 0.0;
  for (const auto& [k, c] : counts) {
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

std::string pos_feature_name(PosTag tag) {
  std::string n(tag_name(tag));
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return "pos_prop_" + n;
}

std::set<std::string_view> word_set(const std::vector<std::string>& tokens) {
  std::set<std::string_view> s;
  for (const auto& t : tokens) {
    if (!corpus::is_punctuation(t)) s.insert(t);
  }
  return s;
}

}  // namespace

const std::vector<FeatureInfo>& feature_catalog() {
  static const std::vector<FeatureInfo> catalog = build_catalog();
  return catalog;
}

const FeatureInfo* find_feature(std::string_view name) {
  for (const auto& f : feature_catalog()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::optional<double> FeatureVector::get(std::string_view name) const {
  const auto it = values_.find(std::string(name));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void FeatureVector::set(const std::string& name, double value) {
  if (!find_feature(name)) throw std::invalid_argument(fmt::format("unknown feature '{}'", name));
  if (!std::isfinite(value)) {
    throw std::invalid_argument(fmt::format("feature '{}' of '{}' is not finite", name, dataset_));
  }
  values_[name] = value;
}

void FeatureVector::merge(const FeatureVector& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

FeatureVector lexical_features(const corpus::Dataset& d, const FeatureOptions& opts) {
  if (d.token_count() == 0) {
    throw std::invalid_argument(fmt::format("dataset '{}' has no tokens", d.name()));
  }
  FeatureVector fv(d.name());
  const double n = static_cast<double>(d.token_count());
  const auto& vocab = d.vocabulary();
  fv.set("token_count", n);
  fv.set("conversation_count", static_cast<double>(d.conversations().size()));
  fv.set("ttr", static_cast<double>(vocab.size()) / n);

  // MATTR, windows never crossing a conversation boundary.
  const std::size_t w = std::max<std::size_t>(opts.mattr_window, 1);
  if (d.token_count() < w) {
    fv.set("mattr", static_cast<double>(vocab.size()) / n);
  } else {
    double sum = 0.0;
    std::size_t windows = 0;
    std::vector<std::string_view> stream;
    for (const auto& c : d.conversations()) {
      stream.clear();
      for (const auto& u : c.utterances) {
        for (const auto& t : u.tokens) stream.push_back(t);
      }
      if (stream.empty()) continue;
      if (stream.size() < w) {
        std::set<std::string_view> types(stream.begin(), stream.end());
        sum += static_cast<double>(types.size()) / static_cast<double>(stream.size());
        ++windows;
        continue;
      }
      std::unordered_map<std::string_view, int> counts;
      for (std::size_t i = 0; i < w; ++i) ++counts[stream[i]];
      sum += static_cast<double>(counts.size()) / static_cast<double>(w);
      ++windows;
      for (std::size_t i = w; i < stream.size(); ++i) {
        if (--counts[stream[i - w]] == 0) counts.erase(stream[i - w]);
        ++counts[stream[i]];
        sum += static_cast<double>(counts.size()) / static_cast<double>(w);
        ++windows;
      }
    }
    fv.set("mattr", sum / static_cast<double>(windows));
  }

  if (d.token_count() >= 2) {
    double h = 0.0;
    for (const auto& [type, c] : vocab) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log2(p);
    }
    fv.set("unigram_entropy", std::max(h, 0.0));
  }

  std::size_t hapax = 0;
  std::vector<double> freqs;
  for (const auto& [type, c] : vocab) {
    if (c == 1) ++hapax;
    freqs.push_back(static_cast<double>(c));
  }
  fv.set("hapax_ratio", static_cast<double>(hapax) / static_cast<double>(vocab.size()));

  std::sort(freqs.begin(), freqs.end(), std::greater<>());
  const std::size_t top = std::min(freqs.size(), opts.zipf_top_types);
  if (top >= 2) {
    double mx = 0, my = 0;
    for (std::size_t r = 0; r < top; ++r) {
      mx += std::log(static_cast<double>(r + 1));
      my += std::log(freqs[r]);
    }
    mx /= static_cast<double>(top);
    my /= static_cast<double>(top);
    double sxy = 0, sxx = 0;
    for (std::size_t r = 0; r < top; ++r) {
      const double x = std::log(static_cast<double>(r + 1)) - mx;
      sxy += x * (std::log(freqs[r]) - my);
      sxx += x * x;
    }
    fv.set("zipf_slope", sxy / sxx);
  }
  if (freqs.size() >= 2) {
    const double m = mean(freqs);
    const double sd = population_sd(freqs);
    if (sd > 0) {
      double m3 = 0.0;
      for (double f : freqs) m3 += std::pow((f - m) / sd, 3);
      fv.set("frequency_skewness", m3 / static_cast<double>(freqs.size()));
    }
  }

  std::unordered_map<std::string, double> pairs, left, right, trigrams;
  double n_pairs = 0, n_tri = 0;
  for (const auto& c : d.conversations()) {
    for (const auto& u : c.utterances) {
      const auto& t = u.tokens;
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        pairs[t[i] + '\x1f' + t[i + 1]] += 1;
        left[t[i]] += 1;
        right[t[i + 1]] += 1;
        n_pairs += 1;
      }
      for (std::size_t i = 0; i + 2 < t.size(); ++i) {
        trigrams[t[i] + '\x1f' + t[i + 1] + '\x1f' + t[i + 2]] += 1;
        n_tri += 1;
      }
    }
  }
  if (n_tri > 0) fv.set("trigram_entropy", entropy_bits(trigrams, n_tri));
  if (n_pairs > 0) {
    double mi = 0.0;
    for (const auto& [key, c] : pairs) {
      const auto sep = key.find('\x1f');
      const double pxy = c / n_pairs;
      const double px = left[key.substr(0, sep)] / n_pairs;
      const double py = right[key.substr(sep + 1)] / n_pairs;
      mi += pxy * std::log2(pxy / (px * py));
    }
    fv.set("bigram_mutual_information", std::max(mi, 0.0));
  }
  return fv;
}

TaggedDataset tag_dataset(const corpus::Dataset& d, const PosTagger& tagger) {
  TaggedDataset out;
  for (const auto& c : d.conversations()) {
    auto& conv = out.emplace_back();
    for (const auto& u : c.utterances) conv.push_back(tagger.tag(u.tokens));
  }
  return out;
}

FeatureVector syntactic_features(const corpus::Dataset& d, const TaggedDataset& tagged) {
  if (tagged.size() != d.conversations().size()) {
    throw std::invalid_argument("tagged corpus does not match the dataset");
  }
  FeatureVector fv(d.name());
  std::array<double, kPosTagCount> tag_counts{};
  std::array<double, kPosTagCount * kPosTagCount> bigrams{};
  double n_tags = 0, n_bigrams = 0, caregiver = 0, child = 0, eligible = 0;
  for (std::size_t ci = 0; ci < tagged.size(); ++ci) {
    const auto& utts = d.conversations()[ci].utterances;
    if (tagged[ci].size() != utts.size()) {
      throw std::invalid_argument("tagged corpus does not match the dataset");
    }
    for (std::size_t ui = 0; ui < utts.size(); ++ui) {
      const auto& tu = tagged[ci][ui];
      if (tu.parse_eligible) eligible += 1;
      double non_x = 0;
      for (std::size_t i = 0; i < tu.tags.size(); ++i) {
        tag_counts[static_cast<std::size_t>(tu.tags[i])] += 1;
        n_tags += 1;
        if (tu.tags[i] != PosTag::kX) non_x += 1;
        if (i + 1 < tu.tags.size()) {
          bigrams[static_cast<std::size_t>(tu.tags[i]) * kPosTagCount +
                  static_cast<std::size_t>(tu.tags[i + 1])] += 1;
          n_bigrams += 1;
        }
      }
      if (corpus::is_caregiver(utts[ui].role)) caregiver += non_x;
      if (corpus::is_target_child(utts[ui].role)) child += non_x;
    }
  }
  if (n_tags > 0) {
    for (std::size_t i = 0; i < kPosTagCount; ++i) {
      fv.set(pos_feature_name(static_cast<PosTag>(i)), tag_counts[i] / n_tags);
    }
  }
  if (n_bigrams > 0) {
    double h = 0.0, distinct = 0.0;
    for (double c : bigrams) {
      if (c == 0) continue;
      const double p = c / n_bigrams;
      h -= p * std::log2(p);
      distinct += 1;
    }
    fv.set("pos_bigram_entropy", std::max(h, 0.0));
    fv.set("pos_bigram_diversity", distinct / static_cast<double>(bigrams.size()));
  }
  fv.set("caregiver_pos_token_count", caregiver);
  fv.set("child_pos_token_count", child);
  fv.set("total_parse_eligible", eligible);
  return fv;
}

FeatureVector conversational_features(const corpus::Dataset& d, const FeatureOptions& opts) {
  FeatureVector fv(d.name());
  const std::set<std::string_view> wh(opts.wh_words.begin(), opts.wh_words.end());
  double turns = 0, switches = 0, adjacent = 0, utterances = 0, questions = 0, wh_questions = 0;
  double caregiver_tokens = 0, child_tokens = 0, expansions = 0, expansion_chances = 0;
  for (const auto& c : d.conversations()) {
    const auto& u = c.utterances;
    for (std::size_t i = 0; i < u.size(); ++i) {
      utterances += 1;
      if (i == 0 || u[i].label != u[i - 1].label) turns += 1;
      if (i > 0) {
        adjacent += 1;
        if (u[i].label != u[i - 1].label) switches += 1;
      }
      if (!u[i].tokens.empty() && u[i].tokens.back() == "?") {
        questions += 1;
        if (wh.contains(u[i].tokens.front())) wh_questions += 1;
      }
      const auto n = static_cast<double>(u[i].tokens.size());
      if (corpus::is_caregiver(u[i].role)) caregiver_tokens += n;
      if (corpus::is_target_child(u[i].role)) child_tokens += n;
      if (i > 0 && corpus::is_caregiver(u[i].role) && corpus::is_target_child(u[i - 1].role)) {
        const auto child_words = word_set(u[i - 1].tokens);
        if (!child_words.empty()) {
          expansion_chances += 1;
          const auto words = word_set(u[i].tokens);
          if (std::includes(words.begin(), words.end(), child_words.begin(), child_words.end())) {
            expansions += 1;
          }
        }
      }
    }
  }
  if (!d.conversations().empty()) {
    fv.set("turns_per_conversation", turns / static_cast<double>(d.conversations().size()));
  }
  if (adjacent > 0) fv.set("speaker_switch_rate", switches / adjacent);
  if (utterances > 0) {
    fv.set("question_rate", questions / utterances);
    fv.set("wh_question_rate", wh_questions / utterances);
  }
  if (caregiver_tokens + child_tokens > 0) {
    const double share = caregiver_tokens / (caregiver_tokens + child_tokens);
    fv.set("caregiver_token_share", share);
    fv.set("child_token_share", 1.0 - share);
  }
  if (expansion_chances > 0) fv.set("expansion_rate", expansions / expansion_chances);
  return fv;
}

double kl_divergence_bits(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in support size");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) kl += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double js_divergence_bits(std::span<const double> p, std::span<const double> q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return std::clamp(0.5 * kl_divergence_bits(p, m) + 0.5 * kl_divergence_bits(q, m), 0.0, 1.0);
}

FeatureVector divergence_features(const corpus::Dataset& d,
                                  std::span<const corpus::Dataset> universe,
                                  const FeatureOptions& opts) {
  FeatureVector fv(d.name());
  const double a = opts.divergence_alpha;
  double kl_sum = 0.0, js_sum = 0.0;
  int others = 0;
  for (const auto& q : universe) {
    if (q.name() == d.name()) continue;
    std::set<std::string_view> support;
    for (const auto& [w, c] : d.vocabulary()) support.insert(w);
    for (const auto& [w, c] : q.vocabulary()) support.insert(w);
    const double v = static_cast<double>(support.size());
    const double nd = static_cast<double>(d.token_count()), nq = static_cast<double>(q.token_count());
    std::vector<double> pd, pq;
    for (const auto w : support) {
      const auto cd = d.vocabulary().find(w);
      const auto cq = q.vocabulary().find(w);
      pd.push_back(((cd == d.vocabulary().end() ? 0.0 : static_cast<double>(cd->second)) + a) /
                   (nd + a * v));
      pq.push_back(((cq == q.vocabulary().end() ? 0.0 : static_cast<double>(cq->second)) + a) /
                   (nq + a * v));
    }
    kl_sum += kl_divergence_bits(pd, pq);
    js_sum += js_divergence_bits(pd, pq);
    ++others;
  }
  if (others > 0) {
    fv.set("mean_kl_from_others", kl_sum / others);
    fv.set("mean_js_from_others", js_sum / others);
  }
  return fv;
}

FeatureVector semantic_features(const corpus::Dataset& d, const learners::EmbeddingModel& emb) {
  FeatureVector fv(d.name());
  auto turn_vector = [&](const corpus::Utterance& u) -> std::optional<Eigen::VectorXd> {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.dim());
    int n = 0;
    for (const auto& t : u.tokens) {
      if (auto v = emb.vector(t)) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0 || sum.norm() == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  double cos_sum = 0.0, pairs = 0.0, child_pairs = 0.0;
  for (const auto& c : d.conversations()) {
    std::vector<std::optional<Eigen::VectorXd>> vecs;
    for (const auto& u : c.utterances) vecs.push_back(turn_vector(u));
    for (std::size_t i = 1; i < c.utterances.size(); ++i) {
      const auto& prev = c.utterances[i - 1];
      const auto& cur = c.utterances[i];
      if (prev.label == cur.label || !vecs[i - 1] || !vecs[i]) continue;
      cos_sum += vecs[i - 1]->dot(*vecs[i]) / (vecs[i - 1]->norm() * vecs[i]->norm());
      pairs += 1;
      if (corpus::is_target_child(prev.role) && corpus::is_caregiver(cur.role)) child_pairs += 1;
    }
  }
  if (pairs > 0) fv.set("adjacent_turn_similarity", std::clamp(cos_sum / pairs, -1.0, 1.0));
  fv.set("child_to_caregiver_semantic_pair_count", child_pairs);
  return fv;
}

FeatureVector quality_features(const corpus::Dataset& d, const FeatureOptions& opts) {
  FeatureVector fv(d.name());
  if (d.token_count() == 0) return fv;
  const std::set<std::string_view> unint(opts.unintelligible.begin(), opts.unintelligible.end());
  const std::set<std::string_view> nonling(opts.non_linguistic.begin(), opts.non_linguistic.end());
  double u = 0, p = 0, nl = 0;
  for (const auto& [w, c] : d.vocabulary()) {
    if (unint.contains(w)) u += static_cast<double>(c);
    if (w.size() > 1 && w.back() == '-') p += static_cast<double>(c);
    if (nonling.contains(w)) nl += static_cast<double>(c);
  }
  const double n = static_cast<double>(d.token_count());
  fv.set("unintelligible_rate", u / n);
  fv.set("partial_word_rate", p / n);
  fv.set("non_linguistic_rate", nl / n);
  return fv;
}

FeatureVector mixture_metadata(const corpus::Dataset& d) {
  FeatureVector fv(d.name());
  fv.set("n_families", static_cast<double>(d.families().size()));
  std::vector<double> ages;
  for (const auto& c : d.conversations()) {
    if (c.child_age_months) ages.push_back(*c.child_age_months);
  }
  if (!ages.empty()) {
    const auto [lo, hi] = std::minmax_element(ages.begin(), ages.end());
    fv.set("age_mean", mean(ages));
    fv.set("age_sd", population_sd(ages));
    fv.set("age_min", *lo);
    fv.set("age_max", *hi);
    fv.set("age_range", *hi - *lo);
  }
  return fv;
}

FeatureVector extract_features(const corpus::Dataset& d,
                               std::span<const corpus::Dataset> universe,
                               const learners::EmbeddingModel* emb, const PosTagger& tagger,
                               const FeatureOptions& opts) {
  FeatureVector fv = lexical_features(d, opts);
  fv.merge(syntactic_features(d, tag_dataset(d, tagger)));
  fv.merge(conversational_features(d, opts));
  fv.merge(divergence_features(d, universe, opts));
  if (emb) fv.merge(semantic_features(d, *emb));
  fv.merge(quality_features(d, opts));
  fv.merge(mixture_metadata(d));
  return fv;
}

void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                       const std::string& provenance) {
  std::vector<std::string> columns;
  for (const auto& f : feature_catalog()) {
    if (std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r.has(f.name); })) {
      columns.push_back(f.name);
    }
  }
  std::ostringstream out;
  CsvWriter csv(out);
  csv.comment(provenance);
  std::vector<std::string> header = {"dataset"};
  header.insert(header.end(), columns.begin(), columns.end());
  csv.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> fields = {r.dataset()};
    for (const auto& c : columns) {
      const auto v = r.get(c);
      fields.push_back(v ? format_number(*v) : "");
    }
    csv.row(fields);
  }
  write_file_atomic(path, out.str());
}

void write_feature_json(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                        const std::string& provenance_json) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["provenance"] = ordered_json::parse(provenance_json);
  ordered_json list = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json feats;
    for (const auto& f : feature_catalog()) {
      if (const auto v = r.get(f.name)) feats[f.name] = *v;
    }
    list.push_back({{"dataset", r.dataset()}, {"features", std::move(feats)}});
  }
  doc["datasets"] = std::move(list);
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path) {
  const auto table = read_csv_file(path);
  const std::size_t name_col = table.require_column("dataset");
  std::vector<FeatureVector> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    FeatureVector fv(row.at(name_col));
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == name_col || c >= row.size() || trim(row[c]).empty()) continue;
      const auto v = parse_double(trim(row[c]));
      if (!v) {
        throw UserError(fmt::format("{}: row {} column '{}' is not a finite number",
                                    path.string(), r + 1, table.header[c]));
      }
      if (!find_feature(table.header[c])) {
        throw UserError(fmt::format("{}: unknown feature column '{}'", path.string(),
                                    table.header[c]));
      }
      fv.set(table.header[c], *v);
    }
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace childlm::features
