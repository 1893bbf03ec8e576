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

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace childlm::analysis {

// Rows are experiments, columns features.
struct DesignMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  Eigen::MatrixXd x;

  std::size_t column_index(const std::string& name) const;  // throws if absent
};

// Feature cells before imputation; nullopt marks a missing value.
struct RawDesign {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][column]
};

struct ColumnMissingness {
  std::string column;
  std::size_t missing = 0;
};

struct PreparedDesign {
  DesignMatrix design;          // imputed and standardized
  Eigen::VectorXd means;        // of the imputed columns kept
  Eigen::VectorXd sds;          // population sd
  std::vector<ColumnMissingness> missingness;  // columns with at least one gap
  std::vector<std::string> dropped_empty;      // no observed value at all
  std::vector<std::string> dropped_constant;
};

// Missing cells take the column median. Columns with no observed value are
// dropped.
DesignMatrix impute_median(const RawDesign& raw, std::vector<ColumnMissingness>* missingness,
                           std::vector<std::string>* dropped_empty);

// Columns to mean 0, population variance 1; constant columns dropped.
DesignMatrix standardize(const DesignMatrix& m, Eigen::VectorXd* means = nullptr,
                         Eigen::VectorXd* sds = nullptr,
                         std::vector<std::string>* dropped_constant = nullptr);

PreparedDesign prepare_design(const RawDesign& raw);

// Contiguous blocks; the first n % k folds get one extra row. k == n gives
// leave-one-out.
std::vector<std::vector<std::size_t>> contiguous_folds(std::size_t n, std::size_t k);

}  // namespace childlm::analysis
