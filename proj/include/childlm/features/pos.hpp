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

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace childlm::features {

enum class PosTag { kNoun, kVerb, kAdj, kAdv, kPron, kDet, kAdp, kNum, kConj, kPrt, kPunct, kX };
inline constexpr std::size_t kPosTagCount = 12;

// NOUN, VERB, ... X
std::string_view tag_name(PosTag tag);
std::optional<PosTag> parse_tag(std::string_view name);

struct SuffixRule {
  std::string suffix;
  PosTag tag;
  std::size_t min_stem = 2;  // characters that must precede the suffix
};

struct PosTaggedUtterance {
  std::vector<std::string> tokens;
  std::vector<PosTag> tags;
  // False when no token is a word (all punctuation) or more than half the
  // tokens are X.
  bool parse_eligible = false;
};

// Lexicon lookup, then punctuation and digits, then the first matching
// suffix rule, then X.
class PosTagger {
 public:
  PosTagger(std::map<std::string, PosTag, std::less<>> lexicon, std::vector<SuffixRule> rules);

  // Built-in lexicon of frequent child-directed words and English suffix rules.
  static const PosTagger& default_tagger();
  static std::map<std::string, PosTag, std::less<>> default_lexicon();
  static std::vector<SuffixRule> default_rules();
  // word<TAB>TAG lines; '#' comments.
  static std::map<std::string, PosTag, std::less<>> load_lexicon(const std::filesystem::path& path);

  PosTag tag_token(std::string_view token) const;
  PosTaggedUtterance tag(std::span<const std::string> tokens) const;

 private:
  std::map<std::string, PosTag, std::less<>> lexicon_;
  std::vector<SuffixRule> rules_;
};

}  // namespace childlm::features
