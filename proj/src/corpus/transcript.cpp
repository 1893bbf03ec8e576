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

#include "childlm/corpus/transcript.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/corpus/tokenize.hpp"

namespace childlm::corpus {

std::optional<TranscriptLayout> parse_layout(std::string_view name) {
  if (name == "single_line" || name == "single-line") return TranscriptLayout::kSingleLine;
  if (name == "blank_line" || name == "blank-line") return TranscriptLayout::kBlankLine;
  return std::nullopt;
}

SpeakerAliases SpeakerAliases::defaults() {
  SpeakerAliases a;
  a.set("MOT", SpeakerRole::kMother);
  a.set("FAT", SpeakerRole::kFather);
  a.set("CHI", SpeakerRole::kTargetChild);
  a.set("OCHI", SpeakerRole::kOtherChild);
  return a;
}

SpeakerRole SpeakerAliases::role_for(std::string_view label) const {
  auto it = table_.find(label);
  return it == table_.end() ? SpeakerRole::kOther : it->second;
}

Utterance make_utterance(std::string label, std::string text, const SpeakerAliases& aliases) {
  Utterance u;
  u.role = aliases.role_for(label);
  u.tokens = tokenize(text);
  u.label = std::move(label);
  u.text = std::move(text);
  return u;
}

namespace {

struct RecordContext {
  std::size_t index;
  std::size_t line;
  const TranscriptOptions& options;
  TranscriptReadResult& result;

  void error(std::string message) {
    result.errors.push_back({index, line, std::move(message)});
  }
  void warn(std::string message) {
    result.warnings.push_back(
        fmt::format("record {} (line {}): {}", index, line, std::move(message)));
  }
};

// Removes a trailing end-of-text sentinel. Returns false if the sentinel is
// followed by anything other than whitespace.
bool strip_sentinel(std::string& text, bool& found) {
  found = false;
  const auto pos = text.rfind(kEndOfText);
  if (pos == std::string::npos) return true;
  if (!trim(std::string_view(text).substr(pos + kEndOfText.size())).empty()) return false;
  found = true;
  text.erase(pos);
  return true;
}

void parse_record(std::vector<std::string> pieces, RecordContext ctx) {
  Conversation conv;
  conv.family_id = ctx.options.family_id;
  conv.child_age_months = ctx.options.child_age_months;
  std::size_t utterance_no = 0;
  for (auto& raw : pieces) {
    std::string piece = trim(raw);
    if (piece.empty()) continue;
    ++utterance_no;
    if (piece.rfind("**", 0) != 0) {
      if (utterance_no == 1) {
        ctx.error(fmt::format("record {} has no speaker header (expected '**LABEL**:')",
                              ctx.index));
      } else {
        ctx.error(fmt::format("utterance {} of record {} has no speaker header",
                              utterance_no, ctx.index));
      }
      return;
    }
    const auto close = piece.find("**", 2);
    if (close == std::string::npos) {
      ctx.error(fmt::format("malformed speaker header in record {} (no closing '**')",
                            ctx.index));
      return;
    }
    std::string label = piece.substr(2, close - 2);
    if (trim(label).empty() || label != trim(label)) {
      ctx.error(fmt::format("empty or padded speaker label in record {}", ctx.index));
      return;
    }
    std::string_view rest = std::string_view(piece).substr(close + 2);
    if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
    conv.utterances.push_back(
        make_utterance(std::move(label), trim(rest), ctx.options.aliases));
  }
  if (conv.utterances.empty()) {
    ctx.error(fmt::format("record {} has no speaker header", ctx.index));
    return;
  }
  ctx.result.conversations.push_back(std::move(conv));
}

std::vector<std::string> split_escaped(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(kUtteranceSeparator, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + kUtteranceSeparator.size();
  }
}

void read_single_line(std::istream& in, const TranscriptOptions& options,
                      TranscriptReadResult& result) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    RecordContext ctx{record++, line_no, options, result};
    bool found = false;
    if (!strip_sentinel(line, found)) {
      ctx.error(fmt::format("text after end-of-text sentinel in record {}", ctx.index));
      continue;
    }
    if (!found) ctx.warn("missing end-of-text sentinel");
    parse_record(split_escaped(line), ctx);
  }
}

void read_blank_line(std::istream& in, const TranscriptOptions& options,
                     TranscriptReadResult& result) {
  std::size_t record = 0;
  std::size_t record_line = 0;
  std::vector<std::string> paragraphs;
  std::string paragraph;
  std::size_t paragraph_line = 0;

  auto finish_record = [&](bool sentinel_seen) {
    if (paragraphs.empty()) return;
    RecordContext ctx{record++, record_line, options, result};
    if (!sentinel_seen) ctx.warn("missing end-of-text sentinel");
    parse_record(std::move(paragraphs), ctx);
    paragraphs.clear();
  };
  auto finish_paragraph = [&]() {
    if (paragraph.empty()) return;
    if (paragraphs.empty()) record_line = paragraph_line;
    bool found = false;
    if (!strip_sentinel(paragraph, found)) {
      result.errors.push_back({record, record_line, "text after end-of-text sentinel"});
      found = true;
    }
    paragraphs.push_back(std::move(paragraph));
    paragraph.clear();
    if (found) finish_record(true);
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) {
      finish_paragraph();
      continue;
    }
    if (paragraph.empty()) {
      paragraph_line = line_no;
    } else {
      paragraph += ' ';
    }
    paragraph += t;
  }
  finish_paragraph();
  finish_record(false);
}

}  // namespace

TranscriptReadResult read_transcripts(std::istream& in, const TranscriptOptions& options) {
  TranscriptReadResult result;
  if (options.layout == TranscriptLayout::kSingleLine) {
    read_single_line(in, options, result);
  } else {
    read_blank_line(in, options, result);
  }
  if (result.conversations.empty() && result.errors.empty()) {
    result.warnings.emplace_back("transcript contains no conversations");
  }
  return result;
}

TranscriptReadResult read_transcript_file(const std::filesystem::path& path,
                                          const TranscriptOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError(fmt::format("cannot open transcript file '{}'", path.string()));
  return read_transcripts(in, options);
}

Dataset parse_transcripts(const std::filesystem::path& path, const TranscriptOptions& options,
                          std::string dataset_name) {
  auto result = read_transcript_file(path, options);
  for (const auto& w : result.warnings) log_warning(fmt::format("{}: {}", path.string(), w));
  if (!result.errors.empty()) {
    std::string message = fmt::format("{}: {} malformed record(s)", path.string(),
                                      result.errors.size());
    for (const auto& e : result.errors) {
      message += fmt::format("\n  line {}: {}", e.line, e.message);
    }
    throw TranscriptError(std::move(message), std::move(result.errors));
  }
  if (dataset_name.empty()) {
    dataset_name = options.family_id.empty() ? path.stem().string() : options.family_id;
  }
  return Dataset(std::move(dataset_name), std::move(result.conversations));
}

std::string serialize_conversation(const Conversation& c, TranscriptLayout layout) {
  std::string out;
  const std::string_view sep =
      layout == TranscriptLayout::kSingleLine ? " \\n\\n " : "\n\n";
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    const auto& u = c.utterances[i];
    if (i) out += sep;
    out += "**";
    out += u.label;
    out += "**:";
    if (!u.text.empty()) {
      out += ' ';
      out += u.text;
    }
  }
  out += ' ';
  out += kEndOfText;
  return out;
}

void write_transcripts(std::ostream& out, std::span<const Conversation> conversations,
                       TranscriptLayout layout) {
  for (const auto& c : conversations) {
    out << serialize_conversation(c, layout);
    out << (layout == TranscriptLayout::kSingleLine ? "\n" : "\n\n");
  }
}

}  // namespace childlm::corpus
