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

#include "childlm/corpus/sampling.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "childlm/common/log.hpp"
#include "childlm/common/rng.hpp"

namespace childlm::corpus {

SplitPair split_train_val(const Dataset& d, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument(fmt::format("split ratio {} is outside (0, 1)", ratio));
  }
  const auto& convs = d.conversations();
  if (convs.size() < 2) {
    throw std::invalid_argument(fmt::format(
        "dataset '{}' needs at least 2 conversations to split, has {}", d.name(),
        convs.size()));
  }
  std::vector<std::size_t> order(convs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "split:" + d.name()));
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return convs[a].token_count() > convs[b].token_count();
  });

  const double total = static_cast<double>(d.token_count());
  std::vector<bool> in_train(convs.size(), false);
  std::size_t train_tokens = 0;
  std::size_t n_train = 0;
  for (std::size_t idx : order) {
    if (total > 0 && static_cast<double>(train_tokens) / total >= ratio) break;
    if (total == 0 && static_cast<double>(n_train) / convs.size() >= ratio) break;
    in_train[idx] = true;
    train_tokens += convs[idx].token_count();
    ++n_train;
  }
  if (n_train == convs.size()) in_train[order.back()] = false;

  std::vector<Conversation> train, val;
  for (std::size_t i = 0; i < convs.size(); ++i) {
    (in_train[i] ? train : val).push_back(convs[i]);
  }
  return SplitPair{Dataset(d.name() + "/train", std::move(train)),
                   Dataset(d.name() + "/val", std::move(val)), ratio};
}

namespace {

struct FamilyPool {
  std::string family_id;
  std::vector<const Conversation*> conversations;
  std::size_t tokens = 0;
};

std::vector<FamilyPool> collect_families(std::span<const Dataset> sources) {
  std::map<std::string, FamilyPool> pools;
  for (const auto& src : sources) {
    if (src.empty()) {
      log_warning(fmt::format("mixture source '{}' has no conversations; skipped", src.name()));
      continue;
    }
    for (const auto& c : src.conversations()) {
      auto& pool = pools[c.family_id];
      pool.family_id = c.family_id;
      pool.conversations.push_back(&c);
      pool.tokens += c.token_count();
    }
  }
  std::vector<FamilyPool> out;
  for (auto& [id, pool] : pools) out.push_back(std::move(pool));
  return out;
}

}  // namespace

std::map<std::string, double> mixture_quotas(std::span<const Dataset> sources,
                                             std::size_t token_budget) {
  const auto pools = collect_families(sources);
  std::size_t total = 0;
  for (const auto& p : pools) total += p.tokens;
  if (token_budget > total) {
    throw std::invalid_argument(fmt::format(
        "mixture budget {} exceeds the {} tokens available", token_budget, total));
  }
  std::map<std::string, double> quotas;
  for (const auto& p : pools) {
    quotas[p.family_id] = static_cast<double>(token_budget) * static_cast<double>(p.tokens) /
                          static_cast<double>(total);
  }
  return quotas;
}

Dataset build_mixture(std::span<const Dataset> sources, std::size_t token_budget,
                      std::uint64_t seed, std::string name) {
  const auto quotas = mixture_quotas(sources, token_budget);
  auto pools = collect_families(sources);
  std::vector<Conversation> picked;
  for (auto& pool : pools) {
    const double quota = quotas.at(pool.family_id);
    Rng rng(derive_seed(seed, "mixture:" + pool.family_id));
    rng.shuffle(pool.conversations);
    std::size_t best_k = 0;
    double best_gap = quota;
    std::size_t cumulative = 0;
    for (std::size_t k = 1; k <= pool.conversations.size(); ++k) {
      cumulative += pool.conversations[k - 1]->token_count();
      const double gap = std::abs(static_cast<double>(cumulative) - quota);
      if (gap < best_gap) {
        best_gap = gap;
        best_k = k;
      }
      if (static_cast<double>(cumulative) > quota) break;
    }
    for (std::size_t k = 0; k < best_k; ++k) picked.push_back(*pool.conversations[k]);
  }
  if (name.empty()) name = fmt::format("mixture-{}", pools.size());
  return Dataset(std::move(name), std::move(picked));
}

}  // namespace childlm::corpus
