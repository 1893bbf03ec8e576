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

#include "childlm/learners/ngram.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "childlm/common/io.hpp"
#include "json.hpp"

namespace childlm::learners {
namespace {

constexpr std::uint32_t kBosId = 0;
constexpr std::uint32_t kEosId = 1;
constexpr std::uint32_t kUnkId = 2;
constexpr std::uint32_t kEmpty = UINT32_MAX;
constexpr int kFormatVersion = 1;

std::array<double, 3> estimate_discounts(const std::array<double, 4>& coc) {
  const double n1 = coc[0], n2 = coc[1], n3 = coc[2], n4 = coc[3];
  std::array<double, 3> d = {0.5, 1.0, 1.5};
  if (n1 > 0) {
    const double y = n1 / (n1 + 2 * n2);
    d[0] = 1 - 2 * y * n2 / n1;
    if (n2 > 0) d[1] = 2 - 3 * y * n3 / n2;
    if (n3 > 0) d[2] = 3 - 4 * y * n4 / n3;
  }
  for (int i = 0; i < 3; ++i) d[i] = std::clamp(d[i], 0.01, static_cast<double>(i + 1));
  return d;
}

}  // namespace

std::size_t NgramModel::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint32_t v : k) {
    h ^= v;
    h *= 1099511628211ull;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

NgramModel NgramModel::train(const corpus::Dataset& train, const NgramOptions& options) {
  if (train.empty() || train.token_count() == 0) {
    throw std::invalid_argument(fmt::format("cannot train an n-gram model on empty dataset '{}'",
                                            train.name()));
  }
  if (options.order < 1 || options.order > kMaxNgramOrder) {
    throw std::invalid_argument(
        fmt::format("n-gram order {} is outside [1, {}]", options.order, kMaxNgramOrder));
  }
  std::size_t longest = 0;
  for (const auto& c : train.conversations()) {
    for (const auto& u : c.utterances) longest = std::max(longest, u.tokens.size());
  }
  if (static_cast<std::size_t>(options.order) > longest + 2) {
    throw std::invalid_argument(fmt::format(
        "n-gram order {} exceeds the longest utterance plus sentinels ({} tokens)",
        options.order, longest + 2));
  }

  NgramModel m;
  m.order_ = options.order;
  m.unk_threshold_ = options.unk_threshold;
  m.words_ = {std::string(kBos), std::string(kEos), std::string(kUnk)};
  for (const auto& [type, count] : train.vocabulary()) {
    if (count >= options.unk_threshold && type != kBos && type != kEos && type != kUnk) {
      m.words_.push_back(type);
    }
  }
  for (std::uint32_t i = 0; i < m.words_.size(); ++i) m.ids_.emplace(m.words_[i], i);

  const int n = m.order_;
  std::vector<std::unordered_map<Key, double, KeyHash>> raw(n);
  std::vector<std::uint32_t> s;
  for (const auto& c : train.conversations()) {
    for (const auto& u : c.utterances) {
      s.assign(1, kBosId);
      for (const auto& t : u.tokens) s.push_back(m.id_of(t));
      s.push_back(kEosId);
      for (std::size_t i = 1; i < s.size(); ++i) {
        const int kmax = std::min<int>(n, static_cast<int>(i) + 1);
        for (int k = 1; k <= kmax; ++k) {
          Key key;
          key.fill(kEmpty);
          std::copy(s.begin() + (i + 1 - k), s.begin() + (i + 1), key.begin());
          raw[k - 1][key] += 1;
        }
      }
    }
  }

  m.levels_.resize(n);
  for (int k = n - 1; k >= 1; --k) {
    auto& level = m.levels_[k - 1].counts;
    for (const auto& [key, count] : raw[k - 1]) {
      if (key[0] == kBosId) level[key] = count;
    }
    // Continuation counts: distinct left extensions among the raw (k+1)-grams.
    for (const auto& [key, count] : raw[k]) {
      if (key[1] == kBosId) continue;
      Key suffix;
      suffix.fill(kEmpty);
      std::copy(key.begin() + 1, key.begin() + k + 1, suffix.begin());
      level[suffix] += 1;
    }
  }
  m.levels_[n - 1].counts = std::move(raw[n - 1]);
  m.finalize(true);
  return m;
}

void NgramModel::finalize(bool estimate) {
  for (int k = 1; k <= order_; ++k) {
    auto& level = levels_[k - 1];
    std::array<double, 4> coc{};
    for (const auto& [key, count] : level.counts) {
      const auto c = static_cast<long>(std::llround(count));
      if (c >= 1 && c <= 4) coc[c - 1] += 1;
    }
    if (estimate) level.discounts = estimate_discounts(coc);
    level.contexts.clear();
    for (const auto& [key, count] : level.counts) {
      Key ctx = key;
      ctx[k - 1] = kEmpty;
      auto& st = level.contexts[ctx];
      st.total += count;
      const auto c = std::llround(count);
      st.n[std::min<long long>(c, 3) - 1] += 1;
    }
  }
}

std::uint32_t NgramModel::id_of(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

bool NgramModel::known(std::string_view word) const { return ids_.contains(std::string(word)); }

double NgramModel::prob_ids(const std::uint32_t* context, int context_len,
                            std::uint32_t word) const {
  context_len = std::min(context_len, order_ - 1);
  const std::uint32_t* h = context;
  double p = 1.0 / static_cast<double>(words_.size() - 1);
  for (int k = 1; k <= context_len + 1; ++k) {
    const auto& level = levels_[k - 1];
    Key key;
    key.fill(kEmpty);
    // Last k-1 context words, then the predicted word.
    std::copy(h + (context_len - (k - 1)), h + context_len, key.begin());
    const auto ctx = level.contexts.find(key);
    if (ctx == level.contexts.end()) continue;
    key[k - 1] = word;
    const auto hit = level.counts.find(key);
    double numerator = 0.0;
    if (hit != level.counts.end()) {
      const double c = hit->second;
      const int bucket = std::min<int>(static_cast<int>(std::llround(c)), 3) - 1;
      numerator = std::max(c - level.discounts[bucket], 0.0);
    }
    const auto& st = ctx->second;
    const double gamma_num = level.discounts[0] * st.n[0] + level.discounts[1] * st.n[1] +
                             level.discounts[2] * st.n[2];
    p = (numerator + gamma_num * p) / st.total;
  }
  return p;
}

double NgramModel::prob(std::span<const std::string> context, std::string_view word) const {
  std::vector<std::uint32_t> ids;
  for (const auto& w : context) ids.push_back(w == kBos ? kBosId : id_of(w));
  const int len = std::min<int>(static_cast<int>(ids.size()), order_ - 1);
  const std::uint32_t w = word == kBos ? kBosId : id_of(word);
  if (w == kBosId) return 0.0;
  return prob_ids(ids.data() + (ids.size() - len), len, w);
}

std::vector<double> NgramModel::token_nlls(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw std::invalid_argument("cannot score an empty token sequence");
  std::vector<std::uint32_t> s(1, kBosId);
  for (const auto& t : tokens) s.push_back(id_of(t));
  std::vector<double> out;
  out.reserve(tokens.size());
  for (std::size_t i = 1; i < s.size(); ++i) {
    const int len = std::min<int>(static_cast<int>(i), order_ - 1);
    out.push_back(-std::log(prob_ids(s.data() + (i - len), len, s[i])));
  }
  return out;
}

double NgramModel::sequence_logprob(std::span<const std::string> tokens) const {
  double total = 0.0;
  for (double v : token_nlls(tokens)) total -= v;
  return total;
}

std::string NgramModel::name() const { return fmt::format("kn{}", order_); }

ItemScore NgramModel::score(std::string_view item_id, std::span<const TokenSeq> utterances) const {
  if (utterances.empty()) throw std::invalid_argument(fmt::format("item '{}' is empty", item_id));
  ItemScore out;
  for (const auto& u : utterances) {
    if (u.empty()) {
      throw std::invalid_argument(fmt::format("item '{}' has an empty utterance", item_id));
    }
    const auto nlls = token_nlls(u);
    out.token_nlls.insert(out.token_nlls.end(), nlls.begin(), nlls.end());
  }
  for (double v : out.token_nlls) out.logprob -= v;
  return out;
}

std::vector<std::string> NgramModel::predictable_vocabulary() const {
  return {words_.begin() + 1, words_.end()};
}

void NgramModel::save(const std::filesystem::path& path) const {
  using nlohmann::json;
  json doc;
  doc["format"] = "childlm-ngram";
  doc["version"] = kFormatVersion;
  doc["order"] = order_;
  doc["unk_threshold"] = unk_threshold_;
  doc["words"] = words_;
  json levels = json::array();
  for (int k = 1; k <= order_; ++k) {
    const auto& level = levels_[k - 1];
    std::map<std::vector<std::uint32_t>, double> sorted;
    for (const auto& [key, count] : level.counts) {
      sorted.emplace(std::vector<std::uint32_t>(key.begin(), key.begin() + k), count);
    }
    json grams = json::array();
    for (const auto& [ids, count] : sorted) {
      json row = ids;
      row.push_back(count);
      grams.push_back(std::move(row));
    }
    levels.push_back({{"discounts", level.discounts}, {"counts", std::move(grams)}});
  }
  doc["levels"] = std::move(levels);
  write_file_atomic(path, doc.dump() + "\n");
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw UserError(fmt::format("'{}' is not a readable n-gram model: {}", path.string(), e.what()));
  }
  if (doc.value("format", "") != "childlm-ngram" || doc.value("version", 0) != kFormatVersion) {
    throw UserError(fmt::format("'{}' is not a version {} childlm n-gram model", path.string(),
                                kFormatVersion));
  }
  NgramModel m;
  try {
    m.order_ = doc.at("order").get<int>();
    m.unk_threshold_ = doc.at("unk_threshold").get<std::size_t>();
    m.words_ = doc.at("words").get<std::vector<std::string>>();
    for (std::uint32_t i = 0; i < m.words_.size(); ++i) m.ids_.emplace(m.words_[i], i);
    const auto& levels = doc.at("levels");
    if (m.order_ < 1 || m.order_ > kMaxNgramOrder ||
        levels.size() != static_cast<std::size_t>(m.order_) || m.words_.size() < 3) {
      throw UserError("inconsistent header");
    }
    m.levels_.resize(m.order_);
    for (int k = 1; k <= m.order_; ++k) {
      auto& level = m.levels_[k - 1];
      level.discounts = levels[k - 1].at("discounts").get<std::array<double, 3>>();
      for (const auto& row : levels[k - 1].at("counts")) {
        Key key;
        key.fill(kEmpty);
        for (int j = 0; j < k; ++j) key[j] = row.at(j).get<std::uint32_t>();
        level.counts[key] = row.at(k).get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw UserError(fmt::format("n-gram model '{}' is malformed: {}", path.string(), e.what()));
  } catch (const UserError& e) {
    throw UserError(fmt::format("n-gram model '{}' is malformed: {}", path.string(), e.what()));
  }
  m.finalize(false);
  return m;
}

}  // namespace childlm::learners
