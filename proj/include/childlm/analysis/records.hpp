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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace childlm::analysis {

inline const std::vector<std::string> kRecordMetrics = {"zorro", "wordsim", "comps", "ewok"};

// One trained learner evaluated on every suite.
struct ExperimentRecord {
  std::string dataset;
  std::string model;
  std::uint64_t seed = 0;
  double tokens = 0.0;
  std::map<std::string, double> metrics;  // absent: not evaluated

  std::optional<double> metric(const std::string& name) const;
};

// Columns dataset, model, seed, tokens, zorro, wordsim, comps, ewok; "NA"
// or empty marks a missing metric.
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentRecord>& records,
                       const std::string& provenance);
std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path);

struct ConditionSummary {
  std::string dataset;
  std::string model;
  std::size_t seeds = 0;
  double tokens = 0.0;  // mean over seeds
  std::map<std::string, std::pair<double, double>> metrics;  // mean, sample sd
};

// Mean and sample sd across seeds per (dataset, model), sorted by key.
std::vector<ConditionSummary> summarize_records(const std::vector<ExperimentRecord>& records);

}  // namespace childlm::analysis
