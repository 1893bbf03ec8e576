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

#include "childlm/corpus/manifest.hpp"

#include <fmt/format.h>


#include "childlm/common/io.hpp"
#include "json.hpp"

namespace childlm::corpus {

using nlohmann::json;

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  json doc;
  try {
    doc = json::parse(read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw UserError(fmt::format("manifest '{}' is not valid JSON: {}",
                                manifest_path.string(), e.what()));
  }
  if (!doc.is_array()) {
    throw UserError(fmt::format("manifest '{}' must be a JSON array", manifest_path.string()));
  }
  const auto base = manifest_path.parent_path();
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& row = doc[i];
    if (!row.is_object() || !row.contains("path") || !row["path"].is_string() ||
        !row.contains("family_id") || !row["family_id"].is_string()) {
      throw UserError(fmt::format("manifest '{}' entry {} needs string 'path' and 'family_id'",
                                  manifest_path.string(), i));
    }
    ManifestEntry e;
    std::filesystem::path p = row["path"].get<std::string>();
    e.path = p.is_absolute() ? p : base / p;
    e.family_id = row["family_id"].get<std::string>();
    if (row.contains("child_age_months") && !row["child_age_months"].is_null()) {
      if (!row["child_age_months"].is_number_integer() ||
          row["child_age_months"].get<int>() < 0) {
        throw UserError(fmt::format(
            "manifest '{}' entry {}: child_age_months must be a non-negative integer",
            manifest_path.string(), i));
      }
      e.child_age_months = row["child_age_months"].get<int>();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& manifest_path,
                    const std::vector<ManifestEntry>& entries) {
  json doc = json::array();
  const auto base = manifest_path.parent_path();
  for (const auto& e : entries) {
    json row;
    row["path"] = e.path.is_absolute() && !base.empty()
                      ? std::filesystem::relative(e.path, base).generic_string()
                      : e.path.generic_string();
    row["family_id"] = e.family_id;
    row["child_age_months"] = e.child_age_months ? json(*e.child_age_months) : json(nullptr);
    doc.push_back(std::move(row));
  }
  write_file_atomic(manifest_path, doc.dump(2) + "\n");
}

}  // namespace childlm::corpus
