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

// Dataset-level linguistic features. Every extractor returns only the
// features it can define; an undefined value is left out rather than stored
// as NaN. Tokens are tokenizer output, punctuation included.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "childlm/corpus/dataset.hpp"
#include "childlm/features/pos.hpp"
#include "childlm/learners/embeddings.hpp"

namespace childlm::features {

struct FeatureInfo {
  std::string name;
  std::string category;  // lexical, syntactic, conversational, divergence, semantic, quality, mixture
  std::string formula;
};

// Every feature this library can emit, in output column order.
const std::vector<FeatureInfo>& feature_catalog();
const FeatureInfo* find_feature(std::string_view name);

class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::string dataset) : dataset_(std::move(dataset)) {}

  const std::string& dataset() const { return dataset_; }
  const std::map<std::string, double>& values() const { return values_; }
  std::optional<double> get(std::string_view name) const;
  bool has(std::string_view name) const { return values_.contains(std::string(name)); }

  // Throws on a name outside the catalog or a non-finite value.
  void set(const std::string& name, double value);
  void merge(const FeatureVector& other);

 private:
  std::string dataset_;
  std::map<std::string, double> values_;
};

struct FeatureOptions {
  std::size_t mattr_window = 50;
  std::size_t zipf_top_types = 1000;
  double divergence_alpha = 0.5;
  std::vector<std::string> unintelligible = {"xxx", "yyy", "[unintelligible]"};
  std::vector<std::string> non_linguistic = {"[laughs]", "[noise]", "hm", "uh", "um"};
  std::vector<std::string> wh_words = {"what", "where", "who", "whom", "whose", "which", "when",
                                       "why", "how", "what's", "where's", "who's", "how's"};
};

FeatureVector lexical_features(const corpus::Dataset& d, const FeatureOptions& opts = {});

// Tags per conversation, per utterance.
using TaggedDataset = std::vector<std::vector<PosTaggedUtterance>>;
TaggedDataset tag_dataset(const corpus::Dataset& d, const PosTagger& tagger);
FeatureVector syntactic_features(const corpus::Dataset& d, const TaggedDataset& tagged);

FeatureVector conversational_features(const corpus::Dataset& d, const FeatureOptions& opts = {});

// Mean KL(p_d || p_q) and mean Jensen-Shannon divergence (bits) against the
// other members of `universe` (matched by name), with add-alpha unigram
// smoothing over each pair's union vocabulary.
FeatureVector divergence_features(const corpus::Dataset& d,
                                  std::span<const corpus::Dataset> universe,
                                  const FeatureOptions& opts = {});

FeatureVector semantic_features(const corpus::Dataset& d, const learners::EmbeddingModel& emb);
FeatureVector quality_features(const corpus::Dataset& d, const FeatureOptions& opts = {});
FeatureVector mixture_metadata(const corpus::Dataset& d);

// All of the above; semantic features only when `emb` is given.
FeatureVector extract_features(const corpus::Dataset& d,
                               std::span<const corpus::Dataset> universe,
                               const learners::EmbeddingModel* emb, const PosTagger& tagger,
                               const FeatureOptions& opts = {});

// Divergence helpers shared with tests (bits).
double kl_divergence_bits(std::span<const double> p, std::span<const double> q);
double js_divergence_bits(std::span<const double> p, std::span<const double> q);

// Header "dataset" then catalog columns present in any row; empty cell for
// an absent feature.
void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                       const std::string& provenance);
void write_feature_json(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                        const std::string& provenance_json);
std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path);

}  // namespace childlm::features
