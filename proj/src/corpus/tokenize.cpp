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

#include "childlm/corpus/tokenize.hpp"

namespace childlm::corpus {
namespace {

constexpr std::string_view kMarks = ".,?!'\";:";

bool is_mark(char c) { return kMarks.find(c) != std::string_view::npos; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Non-ASCII bytes count as word characters so UTF-8 letters stay attached.
bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (!is_space(c) && !is_mark(c));
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_space(c)) {
      flush();
    } else if (c == '\'' && !word.empty() && i + 1 < text.size() &&
               is_word_char(text[i + 1]) && text[i + 1] != '\'') {
      word += c;
    } else if (is_mark(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      word += lower(c);
    }
  }
  flush();
  return tokens;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (!is_mark(c)) return false;
  }
  return true;
}

}  // namespace childlm::corpus
