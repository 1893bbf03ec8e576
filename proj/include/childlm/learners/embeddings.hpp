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

// Count-based word vectors: symmetric window co-occurrence within
// utterances, PPMI with smoothed context marginals, randomized truncated
// SVD, rows U*sqrt(S) scaled to unit length. Punctuation tokens are not
// words here and are skipped before windowing.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "childlm/corpus/dataset.hpp"

namespace childlm::learners {

struct EmbeddingOptions {
  int window = 5;
  int dim = 100;
  double context_smoothing = 0.75;
  int power_iterations = 4;
  int oversample = 10;
  std::uint64_t seed = 1;
};

struct PpmiMatrix {
  std::vector<std::string> words;  // row/column order
  Eigen::SparseMatrix<double> values;
};

// Raw symmetric co-occurrence counts within +-window.
PpmiMatrix cooccurrence_counts(const corpus::Dataset& d, int window);
PpmiMatrix ppmi(const corpus::Dataset& d, int window, double context_smoothing = 0.75);

struct SvdResult {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;  // descending
  Eigen::MatrixXd v;
};

// Rank-k approximation by randomized subspace iteration with QR
// re-orthonormalization between passes.
SvdResult randomized_svd(const Eigen::SparseMatrix<double>& a, int rank, int power_iterations,
                         int oversample, std::uint64_t seed);

class EmbeddingModel {
 public:
  static EmbeddingModel train(const corpus::Dataset& train, const EmbeddingOptions& options = {});

  int dim() const { return static_cast<int>(vectors_.cols()); }
  const std::vector<std::string>& vocabulary() const { return words_; }
  bool contains(std::string_view word) const;
  // Unit-norm row; nullopt when the word has no vector.
  std::optional<Eigen::VectorXd> vector(std::string_view word) const;
  std::optional<double> cosine(std::string_view a, std::string_view b) const;

  void save(const std::filesystem::path& path) const;
  static EmbeddingModel load(const std::filesystem::path& path);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::MatrixXd vectors_;
};

}  // namespace childlm::learners
