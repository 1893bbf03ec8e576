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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace childlm {

inline constexpr std::string_view kVersion = "0.1.0";

// Raised for problems the user can fix (bad input files, bad config).
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form; identical on every run.
std::string format_number(double value);
std::string format_fixed(double value, int digits);

std::string csv_escape(std::string_view field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
};

// Lines starting with '#' are comments (provenance headers) and skipped.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void comment(std::string_view text);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string read_text_file(const std::filesystem::path& path);

// Writes through a temporary sibling and renames, so readers never observe
// a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);

// Parses a finite double; nullopt on junk or trailing characters.
std::optional<double> parse_double(std::string_view s);

}  // namespace childlm
