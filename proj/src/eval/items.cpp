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

#include "childlm/eval/items.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/corpus/tokenize.hpp"
#include "json.hpp"

namespace childlm::eval {

std::vector<MinimalPairItem> read_minimal_pairs(std::istream& in, const std::string& source) {
  using nlohmann::json;
  std::vector<MinimalPairItem> items;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fail = [&](std::string_view what) {
      return UserError(fmt::format("{}:{}: {}", source, line_no, what));
    };
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(fmt::format("invalid JSON ({})", e.what()));
    }
    for (const char* field : {"id", "benchmark", "subtask", "sentence_good", "sentence_bad"}) {
      if (!row.is_object() || !row.contains(field) || !row[field].is_string()) {
        throw fail(fmt::format("missing string field '{}'", field));
      }
    }
    MinimalPairItem item;
    item.id = row["id"].get<std::string>();
    item.benchmark = row["benchmark"].get<std::string>();
    item.subtask = row["subtask"].get<std::string>();
    item.good = corpus::tokenize(row["sentence_good"].get<std::string>());
    item.bad = corpus::tokenize(row["sentence_bad"].get<std::string>());
    if (item.good.empty() || item.bad.empty()) throw fail("both sentences must have tokens");
    if (item.good == item.bad) throw fail(fmt::format("item '{}' has identical sentences", item.id));
    if (!ids.insert(item.id).second) throw fail(fmt::format("duplicate id '{}'", item.id));
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<MinimalPairItem> load_minimal_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError(fmt::format("cannot open minimal-pair file '{}'", path.string()));
  return read_minimal_pairs(in, path.string());
}

void write_minimal_pairs(const std::filesystem::path& path, const std::vector<RawPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::ordered_json row;
    row["id"] = p.id;
    row["benchmark"] = p.benchmark;
    row["subtask"] = p.subtask;
    row["sentence_good"] = p.good;
    row["sentence_bad"] = p.bad;
    out += row.dump() + "\n";
  }
  write_file_atomic(path, out);
}

namespace {

std::string casefold(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return s;
}

}  // namespace

WordPairSuite read_word_pairs(std::istream& in, const std::string& name) {
  WordPairSuite suite;
  suite.name = name;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 3) {
      throw UserError(fmt::format("{}:{}: expected word1<TAB>word2<TAB>score", name, line_no));
    }
    const auto score = parse_double(trim(fields[2]));
    if (!score) {
      if (suite.pairs.empty() && line_no == 1) continue;  // header row
      throw UserError(fmt::format("{}:{}: score '{}' is not a finite number", name, line_no,
                                  fields[2]));
    }
    suite.pairs.push_back({casefold(trim(fields[0])), casefold(trim(fields[1])), *score});
  }
  return suite;
}

WordPairSuite load_word_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError(fmt::format("cannot open word-pair file '{}'", path.string()));
  return read_word_pairs(in, path.stem().string());
}

void write_word_pairs(const std::filesystem::path& path, const WordPairSuite& suite) {
  std::ostringstream out;
  for (const auto& p : suite.pairs) {
    out << p.word1 << '\t' << p.word2 << '\t' << format_number(p.human_score) << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace childlm::eval
