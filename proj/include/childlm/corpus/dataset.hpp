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

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace childlm::corpus {

enum class SpeakerRole { kTargetChild, kMother, kFather, kOtherChild, kOther };

// CHI, MOT, FAT, OCHI, OTHER.
std::string_view role_code(SpeakerRole role);
std::optional<SpeakerRole> parse_role_code(std::string_view code);

inline bool is_caregiver(SpeakerRole r) {
  return r == SpeakerRole::kMother || r == SpeakerRole::kFather;
}
inline bool is_target_child(SpeakerRole r) { return r == SpeakerRole::kTargetChild; }

struct Utterance {
  SpeakerRole role = SpeakerRole::kOther;
  std::string label;  // raw speaker label between the asterisks
  std::string text;   // raw utterance text
  std::vector<std::string> tokens;
};

struct Conversation {
  std::vector<Utterance> utterances;
  std::string family_id;
  std::optional<int> child_age_months;

  std::size_t token_count() const;
};

using Vocabulary = std::map<std::string, std::size_t, std::less<>>;

// Immutable collection of conversations with cached counts.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::vector<Conversation> conversations);

  const std::string& name() const { return name_; }
  const std::vector<Conversation>& conversations() const { return conversations_; }
  const std::set<std::string>& families() const { return families_; }
  std::size_t token_count() const { return token_count_; }
  std::size_t utterance_count() const { return utterance_count_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  bool empty() const { return conversations_.empty(); }
  bool contains(std::string_view type) const { return vocabulary_.contains(type); }

  Dataset renamed(std::string name) const;

 private:
  std::string name_;
  std::vector<Conversation> conversations_;
  std::set<std::string> families_;
  std::size_t token_count_ = 0;
  std::size_t utterance_count_ = 0;
  Vocabulary vocabulary_;
};

// |types| / tokens. Throws on an empty dataset.
double ttr(const Dataset& d);

Dataset concatenate(std::string name, std::span<const Dataset> parts);

}  // namespace childlm::corpus
