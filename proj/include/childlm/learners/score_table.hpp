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
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "childlm/learners/scorer.hpp"

namespace childlm::learners {

// Scores computed elsewhere (for example by a transformer), read from JSONL
// rows {"item_id": str, "logprob": num, "token_nlls": [num, ...]?}.
class ScoreTable : public Scorer {
 public:
  static ScoreTable read(std::istream& in, std::string source = "<stream>");
  static ScoreTable load(const std::filesystem::path& path);

  std::string name() const override { return name_; }
  ItemScore score(std::string_view item_id, std::span<const TokenSeq> utterances) const override;
  bool has_token_nlls() const override { return all_have_nlls_; }

  std::size_t size() const { return rows_.size(); }
  bool contains(std::string_view item_id) const { return rows_.contains(item_id); }
  std::optional<double> logprob(std::string_view item_id) const;

 private:
  std::string name_;
  std::map<std::string, ItemScore, std::less<>> rows_;
  bool all_have_nlls_ = true;
};

}  // namespace childlm::learners
