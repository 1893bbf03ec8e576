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

#include "childlm/learners/score_table.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#include "childlm/common/io.hpp"
#include "json.hpp"

namespace childlm::learners {

ScoreTable ScoreTable::read(std::istream& in, std::string source) {
  using nlohmann::json;
  ScoreTable table;
  table.name_ = "scores:" + source;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](std::string_view what) {
    return UserError(fmt::format("{}:{}: {}", source, line_no, what));
  };
  auto finite_number = [&](const json& v, std::string_view field) {
    if (!v.is_number()) throw fail(fmt::format("'{}' must be a number", field));
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw fail(fmt::format("'{}' is not finite", field));
    return x;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(fmt::format("invalid JSON ({})", e.what()));
    }
    if (!row.is_object() || !row.contains("item_id") || !row["item_id"].is_string()) {
      throw fail("row needs a string 'item_id'");
    }
    if (!row.contains("logprob")) throw fail("row needs 'logprob'");
    ItemScore s;
    s.logprob = finite_number(row["logprob"], "logprob");
    if (row.contains("token_nlls") && !row["token_nlls"].is_null()) {
      if (!row["token_nlls"].is_array()) throw fail("'token_nlls' must be an array");
      for (const auto& v : row["token_nlls"]) s.token_nlls.push_back(finite_number(v, "token_nlls"));
    } else {
      table.all_have_nlls_ = false;
    }
    const auto id = row["item_id"].get<std::string>();
    if (!table.rows_.emplace(id, std::move(s)).second) {
      throw fail(fmt::format("duplicate item_id '{}'", id));
    }
  }
  return table;
}

ScoreTable ScoreTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError(fmt::format("cannot open score file '{}'", path.string()));
  return read(in, path.filename().string());
}

std::optional<double> ScoreTable::logprob(std::string_view item_id) const {
  const auto it = rows_.find(item_id);
  if (it == rows_.end()) return std::nullopt;
  return it->second.logprob;
}

ItemScore ScoreTable::score(std::string_view item_id, std::span<const TokenSeq> utterances) const {
  const auto it = rows_.find(item_id);
  if (it == rows_.end()) {
    throw UserError(fmt::format("{} has no score for item '{}'", name_, item_id));
  }
  if (!it->second.token_nlls.empty()) {
    std::size_t n = 0;
    for (const auto& u : utterances) n += u.size();
    if (n != 0 && n != it->second.token_nlls.size()) {
      throw UserError(fmt::format("{}: item '{}' has {} token NLLs but {} tokens", name_, item_id,
                                  it->second.token_nlls.size(), n));
    }
  }
  return it->second;
}

}  // namespace childlm::learners
