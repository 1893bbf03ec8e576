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

#include "childlm/analysis/records.hpp"

#include <fmt/format.h>

#include <charconv>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/stats.hpp"

namespace childlm::analysis {

std::optional<double> ExperimentRecord::metric(const std::string& name) const {
  const auto it = metrics.find(name);
  if (it == metrics.end()) return std::nullopt;
  return it->second;
}

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentRecord>& records,
                       const std::string& provenance) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.comment(provenance);
  std::vector<std::string> header = {"dataset", "model", "seed", "tokens"};
  header.insert(header.end(), kRecordMetrics.begin(), kRecordMetrics.end());
  csv.row(header);
  for (const auto& r : records) {
    std::vector<std::string> row = {r.dataset, r.model, std::to_string(r.seed),
                                    format_number(r.tokens)};
    for (const auto& m : kRecordMetrics) {
      const auto v = r.metric(m);
      row.push_back(v ? format_number(*v) : "NA");
    }
    csv.row(row);
  }
  write_file_atomic(path, out.str());
}

std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path) {
  const auto table = read_csv_file(path);
  const auto c_dataset = table.require_column("dataset");
  const auto c_model = table.require_column("model");
  const auto c_seed = table.require_column("seed");
  const auto c_tokens = table.require_column("tokens");
  std::vector<ExperimentRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto fail = [&](std::string_view what) {
      return UserError(fmt::format("{}: record row {}: {}", path.string(), r + 1, what));
    };
    if (row.size() != table.header.size()) throw fail("wrong number of fields");
    ExperimentRecord rec;
    rec.dataset = row[c_dataset];
    rec.model = row[c_model];
    const auto& seed = row[c_seed];
    if (std::from_chars(seed.data(), seed.data() + seed.size(), rec.seed).ec != std::errc{}) {
      throw fail("seed is not an unsigned integer");
    }
    const auto tokens = parse_double(row[c_tokens]);
    if (!tokens || *tokens <= 0) throw fail("tokens must be a positive number");
    rec.tokens = *tokens;
    for (const auto& m : kRecordMetrics) {
      const auto c = table.column(m);
      if (!c) continue;
      const auto text = trim(row[*c]);
      if (text.empty() || text == "NA") continue;
      const auto v = parse_double(text);
      if (!v) throw fail(fmt::format("metric '{}' is not a finite number", m));
      rec.metrics[m] = *v;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ConditionSummary> summarize_records(const std::vector<ExperimentRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) groups[{r.dataset, r.model}].push_back(&r);
  std::vector<ConditionSummary> out;
  for (const auto& [key, rows] : groups) {
    ConditionSummary s;
    s.dataset = key.first;
    s.model = key.second;
    s.seeds = rows.size();
    std::vector<double> tokens;
    for (const auto* r : rows) tokens.push_back(r->tokens);
    s.tokens = mean(tokens);
    for (const auto& m : kRecordMetrics) {
      std::vector<double> v;
      for (const auto* r : rows) {
        if (const auto x = r->metric(m)) v.push_back(*x);
      }
      if (!v.empty()) s.metrics[m] = {mean(v), sample_sd(v)};
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace childlm::analysis
