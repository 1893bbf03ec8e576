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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace childlm::learners {

using TokenSeq = std::vector<std::string>;

struct ItemScore {
  double logprob = 0.0;
  std::vector<double> token_nlls;  // natural log; may be empty for score tables
};

// Anything that can assign a log-probability to an identified item. Items
// consist of one or more utterances, each scored with its own sentinels.
// Implementations are immutable after construction and safe to share
// between threads.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual ItemScore score(std::string_view item_id, std::span<const TokenSeq> utterances) const = 0;
  // True if score() fills token_nlls.
  virtual bool has_token_nlls() const { return true; }
};

// Item ids used when the harness asks a scorer about minimal pairs and
// vocabulary chunks; score files must use the same ids.
std::string good_item_id(std::string_view pair_id);
std::string bad_item_id(std::string_view pair_id);
std::string chunk_item_id(std::size_t conversation, std::size_t chunk);

// Every token has probability 1/vocab_size: the order-0 learner.
class UniformScorer : public Scorer {
 public:
  explicit UniformScorer(std::size_t vocab_size);
  std::string name() const override { return "uniform"; }
  ItemScore score(std::string_view item_id, std::span<const TokenSeq> utterances) const override;

 private:
  double nll_;
};

}  // namespace childlm::learners
