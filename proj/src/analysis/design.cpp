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

#include "childlm/analysis/design.hpp"

#include <fmt/format.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "childlm/common/stats.hpp"

namespace childlm::analysis {

std::size_t DesignMatrix::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return j;
  }
  throw std::invalid_argument(fmt::format("design has no column '{}'", name));
}

DesignMatrix impute_median(const RawDesign& raw, std::vector<ColumnMissingness>* missingness,
                           std::vector<std::string>* dropped_empty) {
  std::set<std::string> seen;
  for (const auto& c : raw.columns) {
    if (!seen.insert(c).second) {
      throw std::invalid_argument(fmt::format("duplicate design column '{}'", c));
    }
  }
  for (const auto& r : raw.cells) {
    if (r.size() != raw.columns.size()) throw std::invalid_argument("ragged design rows");
  }
  if (raw.cells.size() != raw.rows.size()) throw std::invalid_argument("row names do not match rows");
  DesignMatrix out;
  out.rows = raw.rows;
  std::vector<std::vector<double>> kept;
  for (std::size_t j = 0; j < raw.columns.size(); ++j) {
    std::vector<double> observed;
    for (const auto& r : raw.cells) {
      if (r[j]) observed.push_back(*r[j]);
    }
    if (observed.empty()) {
      if (dropped_empty) dropped_empty->push_back(raw.columns[j]);
      continue;
    }
    const std::size_t gaps = raw.cells.size() - observed.size();
    if (gaps > 0 && missingness) missingness->push_back({raw.columns[j], gaps});
    const double fill = median(observed);
    std::vector<double> col;
    for (const auto& r : raw.cells) col.push_back(r[j].value_or(fill));
    kept.push_back(std::move(col));
    out.columns.push_back(raw.columns[j]);
  }
  out.x.resize(static_cast<Eigen::Index>(raw.rows.size()), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kept[j][i];
    }
  }
  return out;
}

DesignMatrix standardize(const DesignMatrix& m, Eigen::VectorXd* means, Eigen::VectorXd* sds,
                         std::vector<std::string>* dropped_constant) {
  const auto n = m.x.rows();
  if (n == 0) throw std::invalid_argument("cannot standardize a design without rows");
  std::vector<Eigen::Index> keep;
  std::vector<double> mu, sd;
  for (Eigen::Index j = 0; j < m.x.cols(); ++j) {
    const double mean = m.x.col(j).mean();
    const double var = (m.x.col(j).array() - mean).square().mean();
    const double s = std::sqrt(var);
    // Constant up to rounding of the mean.
    if (!(s > 1e-12 * std::max(1.0, std::abs(mean)))) {
      if (dropped_constant) dropped_constant->push_back(m.columns[j]);
      continue;
    }
    keep.push_back(j);
    mu.push_back(mean);
    sd.push_back(s);
  }
  DesignMatrix out;
  out.rows = m.rows;
  out.x.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.columns.push_back(m.columns[keep[k]]);
    out.x.col(static_cast<Eigen::Index>(k)) = (m.x.col(keep[k]).array() - mu[k]) / sd[k];
  }
  if (means) *means = Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  if (sds) *sds = Eigen::Map<Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
  return out;
}

PreparedDesign prepare_design(const RawDesign& raw) {
  PreparedDesign p;
  const auto imputed = impute_median(raw, &p.missingness, &p.dropped_empty);
  p.design = standardize(imputed, &p.means, &p.sds, &p.dropped_constant);
  return p;
}

std::vector<std::vector<std::size_t>> contiguous_folds(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) {
    throw std::invalid_argument(fmt::format("{} folds need 2 <= folds <= n = {}", k, n));
  }
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t row = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) folds[f].push_back(row++);
  }
  return folds;
}

}  // namespace childlm::analysis
