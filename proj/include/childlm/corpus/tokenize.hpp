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

#include <string>
#include <string_view>
#include <vector>

namespace childlm::corpus {

// Word-level tokenizer. Lowercases ASCII, splits the marks . , ? ! ' " ; :
// into their own tokens and keeps word-internal apostrophes (don't, let's).
std::vector<std::string> tokenize(std::string_view text);

// True for a token made only of the split punctuation marks.
bool is_punctuation(std::string_view token);

}  // namespace childlm::corpus
