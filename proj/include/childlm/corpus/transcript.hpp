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

// Transcript format
// -----------------
// One conversation per record. Each utterance starts with a speaker header
// "**LABEL**:" followed by its text. In the single-line layout utterances of
// a record are joined by the literal two-character escape pair "\n\n" (a
// backslash, an n, a backslash, an n) and the record is one physical line.
// In the blank-line layout each utterance is a paragraph and paragraphs are
// separated by empty lines. Both layouts end a conversation with the
// sentinel "<|endoftext|>".
//
//   **MOT**: Put it in the oven. \n\n **CHI**: Whoopsie. <|endoftext|>

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "childlm/corpus/dataset.hpp"

namespace childlm::corpus {

inline constexpr std::string_view kEndOfText = "<|endoftext|>";
inline constexpr std::string_view kUtteranceSeparator = "\\n\\n";

enum class TranscriptLayout { kSingleLine, kBlankLine };

// single_line or blank_line; hyphens are accepted too.
std::optional<TranscriptLayout> parse_layout(std::string_view name);

// Maps raw speaker labels to roles. Labels not in the table become kOther.
class SpeakerAliases {
 public:
  // MOT, FAT, CHI, OCHI mapped to their roles.
  static SpeakerAliases defaults();

  void set(std::string label, SpeakerRole role) { table_[std::move(label)] = role; }
  SpeakerRole role_for(std::string_view label) const;
  const std::map<std::string, SpeakerRole, std::less<>>& table() const { return table_; }

 private:
  std::map<std::string, SpeakerRole, std::less<>> table_;
};

struct TranscriptOptions {
  TranscriptLayout layout = TranscriptLayout::kSingleLine;
  SpeakerAliases aliases = SpeakerAliases::defaults();
  std::string family_id;
  std::optional<int> child_age_months;
};

struct RecordIssue {
  std::size_t record_index = 0;  // 0-based
  std::size_t line = 0;          // 1-based line where the record starts
  std::string message;
};

struct TranscriptReadResult {
  std::vector<Conversation> conversations;
  std::vector<RecordIssue> errors;
  std::vector<std::string> warnings;
};

class TranscriptError : public std::runtime_error {
 public:
  TranscriptError(std::string message, std::vector<RecordIssue> issues)
      : std::runtime_error(std::move(message)), issues_(std::move(issues)) {}
  const std::vector<RecordIssue>& issues() const { return issues_; }

 private:
  std::vector<RecordIssue> issues_;
};

Utterance make_utterance(std::string label, std::string text, const SpeakerAliases& aliases);

// Lenient reader: malformed records are reported and skipped.
TranscriptReadResult read_transcripts(std::istream& in, const TranscriptOptions& options);
TranscriptReadResult read_transcript_file(const std::filesystem::path& path,
                                          const TranscriptOptions& options);

// Strict reader: any malformed record raises TranscriptError listing every
// issue. An empty file yields an empty Dataset and a logged warning.
Dataset parse_transcripts(const std::filesystem::path& path, const TranscriptOptions& options,
                          std::string dataset_name = {});

std::string serialize_conversation(const Conversation& c,
                                   TranscriptLayout layout = TranscriptLayout::kSingleLine);
void write_transcripts(std::ostream& out, std::span<const Conversation> conversations,
                       TranscriptLayout layout = TranscriptLayout::kSingleLine);

}  // namespace childlm::corpus
