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

#include "table.hpp"

#include <fmt/format.h>

#include <json.hpp>
#include <sstream>

#include "childlm/common/io.hpp"

namespace childlm::pipeline {

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error(fmt::format("table row has {} cells, expected {}", row.size(),
                                       columns_.size()));
  }
  rows_.push_back(std::move(row));
}

void Table::write(const std::filesystem::path& dir, const std::string& stem,
                  const RunConfig& cfg) const {
  write_csv(dir / (stem + ".csv"), cfg);
  write_json(dir / (stem + ".json"), cfg);
}

void Table::write_csv(const std::filesystem::path& path, const RunConfig& cfg) const {
  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  csv.comment(cfg.provenance());
  std::vector<std::string> header;
  for (const auto& c : columns_) header.push_back(c.name);
  csv.row(header);
  for (const auto& r : rows_) csv.row(r);
  write_file_atomic(path, csv_text.str());
}

void Table::write_json(const std::filesystem::path& path, const RunConfig& cfg) const {
  std::vector<std::string> header;
  for (const auto& c : columns_) header.push_back(c.name);
  nlohmann::ordered_json doc;
  doc["provenance"] = nlohmann::ordered_json::parse(cfg.provenance_json());
  doc["columns"] = header;
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (!columns_[i].numeric) {
        obj[columns_[i].name] = r[i];
      } else if (const auto v = parse_double(r[i])) {
        obj[columns_[i].name] = *v;
      } else {
        obj[columns_[i].name] = nullptr;
      }
    }
    rows.push_back(std::move(obj));
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }
std::string cell(double v) { return format_number(v); }

std::string file_safe(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    out += ok ? ch : '_';
  }
  return out.empty() ? "_" : out;
}

void write_json(const std::filesystem::path& path, const std::string& json_text) {
  write_file_atomic(path, json_text);
}

}  // namespace childlm::pipeline
