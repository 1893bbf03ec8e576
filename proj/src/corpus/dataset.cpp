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

#include "childlm/corpus/dataset.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace childlm::corpus {

std::string_view role_code(SpeakerRole role) {
  switch (role) {
    case SpeakerRole::kTargetChild: return "CHI";
    case SpeakerRole::kMother: return "MOT";
    case SpeakerRole::kFather: return "FAT";
    case SpeakerRole::kOtherChild: return "OCHI";
    case SpeakerRole::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<SpeakerRole> parse_role_code(std::string_view code) {
  if (code == "CHI") return SpeakerRole::kTargetChild;
  if (code == "MOT") return SpeakerRole::kMother;
  if (code == "FAT") return SpeakerRole::kFather;
  if (code == "OCHI") return SpeakerRole::kOtherChild;
  if (code == "OTHER") return SpeakerRole::kOther;
  return std::nullopt;
}

std::size_t Conversation::token_count() const {
  std::size_t n = 0;
  for (const auto& u : utterances) n += u.tokens.size();
  return n;
}

Dataset::Dataset(std::string name, std::vector<Conversation> conversations)
    : name_(std::move(name)), conversations_(std::move(conversations)) {
  for (const auto& c : conversations_) {
    families_.insert(c.family_id);
    utterance_count_ += c.utterances.size();
    for (const auto& u : c.utterances) {
      token_count_ += u.tokens.size();
      for (const auto& t : u.tokens) ++vocabulary_[t];
    }
  }
}

Dataset Dataset::renamed(std::string name) const {
  Dataset copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

double ttr(const Dataset& d) {
  if (d.token_count() == 0) {
    throw std::invalid_argument(fmt::format("ttr: dataset '{}' has no tokens", d.name()));
  }
  return static_cast<double>(d.vocabulary().size()) / static_cast<double>(d.token_count());
}

Dataset concatenate(std::string name, std::span<const Dataset> parts) {
  std::vector<Conversation> all;
  for (const auto& p : parts) {
    all.insert(all.end(), p.conversations().begin(), p.conversations().end());
  }
  return Dataset(std::move(name), std::move(all));
}

}  // namespace childlm::corpus
