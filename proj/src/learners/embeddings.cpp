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

#include "childlm/learners/embeddings.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

#include "childlm/common/io.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/corpus/tokenize.hpp"
#include "json.hpp"

namespace childlm::learners {
namespace {

constexpr int kFormatVersion = 1;

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

PpmiMatrix cooccurrence_counts(const corpus::Dataset& d, int window) {
  if (window < 1) throw std::invalid_argument(fmt::format("window {} must be positive", window));
  PpmiMatrix out;
  std::unordered_map<std::string_view, int> index;
  for (const auto& [type, count] : d.vocabulary()) {
    if (corpus::is_punctuation(type)) continue;
    index.emplace(type, static_cast<int>(out.words.size()));
    out.words.push_back(type);
  }
  std::vector<Eigen::Triplet<double>> cells;
  std::vector<int> ids;
  for (const auto& c : d.conversations()) {
    for (const auto& u : c.utterances) {
      ids.clear();
      for (const auto& t : u.tokens) {
        const auto it = index.find(t);
        if (it != index.end()) ids.push_back(it->second);
      }
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::size_t end = std::min(ids.size(), i + 1 + static_cast<std::size_t>(window));
        for (std::size_t j = i + 1; j < end; ++j) {
          cells.emplace_back(ids[i], ids[j], 1.0);
          cells.emplace_back(ids[j], ids[i], 1.0);
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(out.words.size());
  out.values.resize(n, n);
  out.values.setFromTriplets(cells.begin(), cells.end());
  out.values.makeCompressed();
  return out;
}

PpmiMatrix ppmi(const corpus::Dataset& d, int window, double context_smoothing) {
  auto m = cooccurrence_counts(d, window);
  const auto n = m.values.rows();
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (Eigen::Index k = 0; k < m.values.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.values, k); it; ++it) {
      row_sums(it.row()) += it.value();
      total += it.value();
    }
  }
  Eigen::VectorXd context_p(n);
  double smoothed_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    context_p(i) = std::pow(row_sums(i), context_smoothing);
    smoothed_total += context_p(i);
  }
  if (smoothed_total > 0) context_p /= smoothed_total;

  std::vector<Eigen::Triplet<double>> cells;
  for (Eigen::Index k = 0; k < m.values.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.values, k); it; ++it) {
      const double pxy = it.value() / total;
      const double px = row_sums(it.row()) / total;
      const double v = std::log(pxy / (px * context_p(it.col())));
      if (v > 0) cells.emplace_back(it.row(), it.col(), v);
    }
  }
  m.values.setZero();
  m.values.setFromTriplets(cells.begin(), cells.end());
  m.values.makeCompressed();
  return m;
}

SvdResult randomized_svd(const Eigen::SparseMatrix<double>& a, int rank, int power_iterations,
                         int oversample, std::uint64_t seed) {
  const Eigen::Index limit = std::min(a.rows(), a.cols());
  if (rank < 1 || rank > limit) {
    throw std::invalid_argument(
        fmt::format("SVD rank {} must lie in [1, {}] for a {}x{} matrix", rank, limit, a.rows(),
                    a.cols()));
  }
  const Eigen::Index l = std::min<Eigen::Index>(rank + std::max(oversample, 0), limit);
  Rng rng(seed);
  Eigen::MatrixXd omega(a.cols(), l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) omega(i, j) = rng.normal();
  }
  Eigen::MatrixXd q = orthonormalize(a * omega);
  for (int it = 0; it < power_iterations; ++it) {
    const Eigen::MatrixXd z = orthonormalize(a.transpose() * q);
    q = orthonormalize(a * z);
  }
  const Eigen::MatrixXd b = (a.transpose() * q).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = (q * svd.matrixU()).leftCols(rank);
  out.s = svd.singularValues().head(rank);
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

EmbeddingModel EmbeddingModel::train(const corpus::Dataset& train,
                                     const EmbeddingOptions& options) {
  if (options.dim < 1) throw std::invalid_argument("embedding dim must be positive");
  auto m = ppmi(train, options.window, options.context_smoothing);
  if (m.words.size() < static_cast<std::size_t>(options.dim)) {
    throw std::invalid_argument(fmt::format(
        "dataset '{}' has {} word types, fewer than dim {}; use a smaller dim", train.name(),
        m.words.size(), options.dim));
  }
  // Words without any positive PPMI cell carry no information; drop them.
  std::vector<int> keep;
  std::vector<int> remap(m.words.size(), -1);
  Eigen::VectorXd nnz = Eigen::VectorXd::Zero(m.values.rows());
  for (Eigen::Index k = 0; k < m.values.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.values, k); it; ++it) nnz(it.row()) += 1;
  }
  for (std::size_t i = 0; i < m.words.size(); ++i) {
    if (nnz(static_cast<Eigen::Index>(i)) > 0) {
      remap[i] = static_cast<int>(keep.size());
      keep.push_back(static_cast<int>(i));
    }
  }
  if (keep.size() < static_cast<std::size_t>(options.dim)) {
    throw std::invalid_argument(fmt::format(
        "dataset '{}' has only {} words with co-occurrence statistics, fewer than dim {}; use a "
        "smaller dim",
        train.name(), keep.size(), options.dim));
  }
  std::vector<Eigen::Triplet<double>> cells;
  for (Eigen::Index k = 0; k < m.values.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.values, k); it; ++it) {
      cells.emplace_back(remap[it.row()], remap[it.col()], it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(keep.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(cells.begin(), cells.end());

  const auto svd = randomized_svd(a, options.dim, options.power_iterations, options.oversample,
                                  derive_seed(options.seed, "svd"));
  Eigen::MatrixXd vecs = svd.u * svd.s.cwiseSqrt().asDiagonal();
  EmbeddingModel model;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = vecs.row(i).norm();
    if (norm > 0) rows.push_back(i);
  }
  model.vectors_.resize(static_cast<Eigen::Index>(rows.size()), options.dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = rows[r];
    model.vectors_.row(static_cast<Eigen::Index>(r)) = vecs.row(i) / vecs.row(i).norm();
    model.index_.emplace(m.words[keep[i]], model.words_.size());
    model.words_.push_back(m.words[keep[i]]);
  }
  return model;
}

bool EmbeddingModel::contains(std::string_view word) const {
  return index_.contains(std::string(word));
}

std::optional<Eigen::VectorXd> EmbeddingModel::vector(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return Eigen::VectorXd(vectors_.row(static_cast<Eigen::Index>(it->second)).transpose());
}

std::optional<double> EmbeddingModel::cosine(std::string_view a, std::string_view b) const {
  const auto ia = index_.find(std::string(a));
  const auto ib = index_.find(std::string(b));
  if (ia == index_.end() || ib == index_.end()) return std::nullopt;
  return vectors_.row(static_cast<Eigen::Index>(ia->second))
      .dot(vectors_.row(static_cast<Eigen::Index>(ib->second)));
}

void EmbeddingModel::save(const std::filesystem::path& path) const {
  using nlohmann::json;
  json doc;
  doc["format"] = "childlm-embeddings";
  doc["version"] = kFormatVersion;
  doc["dim"] = dim();
  doc["words"] = words_;
  json rows = json::array();
  for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
    rows.push_back(std::vector<double>(vectors_.row(i).begin(), vectors_.row(i).end()));
  }
  doc["vectors"] = std::move(rows);
  write_file_atomic(path, doc.dump() + "\n");
}

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& path) {
  using nlohmann::json;
  EmbeddingModel m;
  try {
    const json doc = json::parse(read_text_file(path));
    if (doc.value("format", "") != "childlm-embeddings" ||
        doc.value("version", 0) != kFormatVersion) {
      throw UserError(fmt::format("'{}' is not a version {} childlm embedding model",
                                  path.string(), kFormatVersion));
    }
    const int dim = doc.at("dim").get<int>();
    m.words_ = doc.at("words").get<std::vector<std::string>>();
    const auto& rows = doc.at("vectors");
    if (rows.size() != m.words_.size()) throw UserError("row count differs from word count");
    m.vectors_.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto v = rows[i].get<std::vector<double>>();
      if (v.size() != static_cast<std::size_t>(dim)) throw UserError("row length differs from dim");
      for (int j = 0; j < dim; ++j) m.vectors_(static_cast<Eigen::Index>(i), j) = v[j];
      m.index_.emplace(m.words_[i], i);
    }
  } catch (const json::exception& e) {
    throw UserError(fmt::format("embedding model '{}' is malformed: {}", path.string(), e.what()));
  }
  return m;
}

}  // namespace childlm::learners
