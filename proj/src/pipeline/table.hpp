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

// Tabular output shared by the subcommands: a CSV with a provenance comment
// and a JSON mirror whose numeric columns carry numbers.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "childlm/pipeline/config.hpp"

namespace childlm::pipeline {

struct Column {
  std::string name;
  bool numeric = false;
};

class Table {
 public:
  explicit Table(std::vector<Column> columns) : columns_(std::move(columns)) {}

  void add(std::vector<std::string> row);
  std::size_t size() const { return rows_.size(); }

  // <stem>.csv and <stem>.json under dir.
  void write(const std::filesystem::path& dir, const std::string& stem,
             const RunConfig& cfg) const;
  void write_csv(const std::filesystem::path& path, const RunConfig& cfg) const;
  void write_json(const std::filesystem::path& path, const RunConfig& cfg) const;

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// "NA" for a missing value.
std::string cell(const std::optional<double>& v);
std::string cell(double v);

// Lowercase-safe file name for a condition or model label.
std::string file_safe(const std::string& name);

void write_json(const std::filesystem::path& path, const std::string& json_text);

}  // namespace childlm::pipeline
