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

#include "childlm/learners/scorer.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace childlm::learners {

std::string good_item_id(std::string_view pair_id) { return fmt::format("{}:good", pair_id); }
std::string bad_item_id(std::string_view pair_id) { return fmt::format("{}:bad", pair_id); }
std::string chunk_item_id(std::size_t conversation, std::size_t chunk) {
  return fmt::format("conv{}:chunk{}", conversation, chunk);
}

UniformScorer::UniformScorer(std::size_t vocab_size) {
  if (vocab_size == 0) throw std::invalid_argument("uniform scorer needs a nonempty vocabulary");
  nll_ = std::log(static_cast<double>(vocab_size));
}

ItemScore UniformScorer::score(std::string_view item_id,
                               std::span<const TokenSeq> utterances) const {
  ItemScore out;
  for (const auto& u : utterances) {
    if (u.empty()) throw std::invalid_argument(fmt::format("item '{}' has an empty utterance", item_id));
    for (std::size_t i = 0; i < u.size(); ++i) out.token_nlls.push_back(nll_);
  }
  if (out.token_nlls.empty()) throw std::invalid_argument(fmt::format("item '{}' is empty", item_id));
  for (double v : out.token_nlls) out.logprob -= v;
  return out;
}

}  // namespace childlm::learners
