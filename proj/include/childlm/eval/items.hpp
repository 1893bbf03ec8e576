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
#include <string>
#include <vector>

#include "childlm/learners/scorer.hpp"

namespace childlm::eval {

struct MinimalPairItem {
  std::string id;
  std::string benchmark;
  std::string subtask;
  learners::TokenSeq good;
  learners::TokenSeq bad;
};

struct WordPairItem {
  std::string word1;
  std::string word2;
  double human_score = 0.0;
};

struct WordPairSuite {
  std::string name;
  std::vector<WordPairItem> pairs;
};

// JSONL rows {id, benchmark, subtask, sentence_good, sentence_bad}; the
// sentences are tokenized like transcripts.
std::vector<MinimalPairItem> read_minimal_pairs(std::istream& in, const std::string& source);
std::vector<MinimalPairItem> load_minimal_pairs(const std::filesystem::path& path);

struct RawPair {
  std::string id, benchmark, subtask, good, bad;
};
void write_minimal_pairs(const std::filesystem::path& path, const std::vector<RawPair>& pairs);

// word1<TAB>word2<TAB>score per line, one suite per file (named after the
// file stem). A first line whose score column is not numeric is a header.
// Words are casefolded.
WordPairSuite read_word_pairs(std::istream& in, const std::string& name);
WordPairSuite load_word_pairs(const std::filesystem::path& path);
void write_word_pairs(const std::filesystem::path& path, const WordPairSuite& suite);

}  // namespace childlm::eval
