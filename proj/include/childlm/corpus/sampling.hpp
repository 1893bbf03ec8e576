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
#include <map>
#include <span>
#include <string>

#include "childlm/corpus/dataset.hpp"

namespace childlm::corpus {

struct SplitPair {
  Dataset train;
  Dataset val;
  double ratio = 0.85;
};

// Token-share split. Conversations are shuffled with the seed, stably
// ordered largest first (ties keep the shuffled order) and added to train
// until its token share reaches `ratio`. The validation side always keeps at
// least one conversation.
SplitPair split_train_val(const Dataset& d, double ratio, std::uint64_t seed);

// Per-family token quota: budget * family_tokens / total_tokens.
std::map<std::string, double> mixture_quotas(std::span<const Dataset> sources,
                                             std::size_t token_budget);

// Proportional pooled mixture. For each family the conversations are
// shuffled (seeded per family) and the prefix whose cumulative token count is
// closest to the family quota is kept; ties prefer the shorter prefix.
Dataset build_mixture(std::span<const Dataset> sources, std::size_t token_budget,
                      std::uint64_t seed, std::string name = {});

}  // namespace childlm::corpus
