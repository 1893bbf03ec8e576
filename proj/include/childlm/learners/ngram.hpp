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

// Interpolated modified Kneser-Ney n-gram model.
//
// Each utterance is wrapped as <s> w1 .. wm </s>. The highest order and any
// gram starting with <s> keep raw counts; other lower orders use
// continuation counts (number of distinct left neighbours). Per order k:
//
//   p_k(w|h) = max(c(hw) - D(c), 0) / c(h.) + gamma(h) * p_{k-1}(w|h')
//   gamma(h) = (D1 N1(h.) + D2 N2(h.) + D3 N3+(h.)) / c(h.)
//
// with p_0 uniform over every type except <s>. A context never seen at
// order k defers to order k-1 entirely.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "childlm/corpus/dataset.hpp"
#include "childlm/learners/scorer.hpp"

namespace childlm::learners {

inline constexpr int kMaxNgramOrder = 5;
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

struct NgramOptions {
  int order = 3;
  // Types seen fewer times than this become <unk>; 1 maps nothing.
  std::size_t unk_threshold = 1;
};

class NgramModel : public Scorer {
 public:
  static NgramModel train(const corpus::Dataset& train, const NgramOptions& options = {});

  std::string name() const override;
  ItemScore score(std::string_view item_id, std::span<const TokenSeq> utterances) const override;

  // -ln p per token of one utterance, the </s> term excluded.
  std::vector<double> token_nlls(std::span<const std::string> tokens) const;
  double sequence_logprob(std::span<const std::string> tokens) const;

  // p(word | context); context may start with <s> and is truncated to the
  // last order-1 words. Unknown words are scored as <unk>.
  double prob(std::span<const std::string> context, std::string_view word) const;

  int order() const { return order_; }
  std::size_t unk_threshold() const { return unk_threshold_; }
  // D1, D2, D3+ for order k in [1, order].
  const std::array<double, 3>& discounts(int k) const { return levels_.at(k - 1).discounts; }
  // Types that can be predicted: every type except <s>, including </s> and <unk>.
  std::vector<std::string> predictable_vocabulary() const;
  bool known(std::string_view word) const;

  // Versioned JSON dump of adjusted counts and discounts.
  void save(const std::filesystem::path& path) const;
  static NgramModel load(const std::filesystem::path& path);

 private:
  using Key = std::array<std::uint32_t, kMaxNgramOrder>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  struct ContextStats {
    double total = 0;
    std::array<double, 3> n{};  // N1, N2, N3+
  };
  struct Level {
    std::unordered_map<Key, double, KeyHash> counts;  // adjusted
    std::unordered_map<Key, ContextStats, KeyHash> contexts;
    std::array<double, 3> discounts{};
  };

  NgramModel() = default;
  std::uint32_t id_of(std::string_view word) const;
  double prob_ids(const std::uint32_t* context, int context_len, std::uint32_t word) const;
  void finalize(bool estimate_discounts);

  int order_ = 3;
  std::size_t unk_threshold_ = 1;
  std::vector<std::string> words_;  // 0 = <s>, 1 = </s>, 2 = <unk>
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<Level> levels_;  // levels_[k-1] holds k-grams
};

}  // namespace childlm::learners
