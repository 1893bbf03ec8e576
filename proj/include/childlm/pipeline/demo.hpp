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

// Self-contained demo workspace built from the synthetic generator:
// transcripts and manifest, benchmark suites, a simulated CDI file and a
// config.json that ties them together.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "childlm/aoa/aoa.hpp"

namespace childlm::pipeline {

struct DemoOptions {
  std::size_t families = 8;
  std::size_t min_family_tokens = 4000;
  std::size_t max_family_tokens = 20000;
  std::size_t series_tokens = 60000;  // 0: no series
  std::size_t cdi_children = 500;
  std::uint64_t seed = 7;
};

void write_demo_workspace(const std::filesystem::path& dir, const DemoOptions& opts = {});

// Binomial-logistic production data: each of `children` children gets an
// integer age uniform in [min_age, max_age]; a word with parameters
// (b0, b_age) is produced with probability sigmoid(b0 + b_age * age).
// Observations are pooled per age.
std::vector<aoa::CdiObservation> simulate_cdi_observations(double b0, double b_age,
                                                           std::size_t children, int min_age,
                                                           int max_age, std::uint64_t seed);

}  // namespace childlm::pipeline
