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

#include "childlm/pipeline/config.hpp"

#include <fmt/format.h>

#include <json.hpp>
#include <set>

#include "childlm/common/io.hpp"
#include "childlm/common/rng.hpp"

namespace childlm::pipeline {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Reads keys of one object and rejects the ones nobody asked for, so a
// misspelled key fails loudly instead of silently taking the default.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw UserError(fmt::format("config: {} must be an object", label()));
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw UserError(fmt::format("config: {} has the wrong type", path(key)));
    }
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw UserError(fmt::format("config: unknown key '{}'", path(key)));
    }
  }

 private:
  std::string label() const { return where_.empty() ? "the document" : "'" + where_ + "'"; }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UserError(fmt::format("override '{}' is not key=value", assignment));
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &doc;
  for (const auto& part : split(key, '.')) {
    if (part.empty()) throw UserError(fmt::format("override '{}' has an empty key part", key));
    if (!node->is_object() && !node->is_null()) {
      throw UserError(fmt::format("override '{}' descends into a non-object", key));
    }
    node = &(*node)[part];
  }
  *node = std::move(value);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

fs::path existing(const fs::path& base, const std::string& p, const std::string& key) {
  auto path = resolve(base, p);
  if (!fs::exists(path)) {
    throw UserError(fmt::format("config: {} points to a missing file: {}", key, path.string()));
  }
  return path;
}

std::vector<std::string> string_list(Section& s, const std::string& key,
                                     std::vector<std::string> fallback) {
  return s.get<std::vector<std::string>>(key, std::move(fallback));
}

}  // namespace

const ModelSpec& RunConfig::model(const std::string& name) const {
  for (const auto& m : models) {
    if (m.name == name) return m;
  }
  throw UserError(fmt::format("no model named '{}' in the config", name));
}

std::string RunConfig::provenance() const {
  return fmt::format("childlm {} config={}", kVersion, hash);
}

std::string RunConfig::provenance_json() const {
  json j = {{"tool", "childlm"}, {"version", std::string(kVersion)}, {"config_hash", hash}};
  return j.dump();
}

RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  if (!fs::exists(path)) throw UserError(fmt::format("config file not found: {}", path.string()));
  return parse_config(read_text_file(path), fs::absolute(path).parent_path(), overrides);
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir,
                       const std::vector<std::string>& overrides) {
  json doc = json::parse(text, nullptr, false, true);
  if (doc.is_discarded()) throw UserError("config: not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);

  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.hash = fmt::format("{:016x}", fnv1a64(doc.dump()));

  Section top(doc, "");
  if (!top.has("manifest")) throw UserError("config: 'manifest' is required");
  cfg.manifest = existing(base_dir, top.get<std::string>("manifest", ""), "manifest");
  cfg.output_dir = resolve(base_dir, top.get<std::string>("output_dir", "out"));
  cfg.seeds = top.get<std::vector<std::uint64_t>>("seeds", {1});
  if (cfg.seeds.empty()) throw UserError("config: 'seeds' must not be empty");
  if (std::set(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    throw UserError("config: 'seeds' contains duplicates");
  }
  cfg.workers = top.get<int>("workers", 1);
  if (cfg.workers < 1) throw UserError("config: 'workers' must be at least 1");
  cfg.split_ratio = top.get<double>("split_ratio", 0.85);
  if (!(cfg.split_ratio > 0 && cfg.split_ratio < 1)) {
    throw UserError("config: 'split_ratio' must lie strictly between 0 and 1");
  }

  if (top.has("transcripts")) {
    Section t(top.at("transcripts"), "transcripts");
    const auto layout = t.get<std::string>("layout", "single_line");
    const auto parsed = corpus::parse_layout(layout);
    if (!parsed) throw UserError(fmt::format("config: unknown transcripts.layout '{}'", layout));
    cfg.layout = *parsed;
    for (const auto& [label, code] :
         t.get<std::map<std::string, std::string>>("speaker_aliases", {})) {
      const auto role = corpus::parse_role_code(code);
      if (!role) {
        throw UserError(fmt::format("config: speaker alias {} -> '{}' is not a role code", label,
                                    code));
      }
      cfg.aliases.set(label, *role);
    }
    t.finish();
  }

  if (top.has("conditions")) {
    Section c(top.at("conditions"), "conditions");
    cfg.individual = c.get<bool>("individual", true);
    cfg.all_families = c.get<bool>("all_families", true);
    if (c.has("mixtures")) {
      for (const auto& m : c.at("mixtures")) {
        Section s(m, "conditions.mixtures[]");
        MixtureSpec spec;
        spec.top = s.get<std::size_t>("top", 0);
        spec.families = string_list(s, "families", {});
        spec.budget = s.get<std::size_t>("budget", 0);
        spec.name = s.get<std::string>("name", spec.top > 0 ? fmt::format("top{}", spec.top) : "");
        s.finish();
        if ((spec.top == 0) == spec.families.empty()) {
          throw UserError("config: each mixture needs exactly one of 'top' or 'families'");
        }
        if (spec.name.empty()) throw UserError("config: a mixture with 'families' needs a name");
        cfg.mixtures.push_back(std::move(spec));
      }
    }
    if (c.has("series")) {
      for (const auto& m : c.at("series")) {
        Section s(m, "conditions.series[]");
        SeriesSpec spec;
        spec.name = s.get<std::string>("name", "");
        if (spec.name.empty()) throw UserError("config: each series needs a name");
        if (!s.has("transcripts")) throw UserError("config: each series needs 'transcripts'");
        spec.transcripts = existing(base_dir, s.get<std::string>("transcripts", ""),
                                    "conditions.series[].transcripts");
        spec.budgets = s.get<std::vector<std::size_t>>("budgets", {});
        if (spec.budgets.empty()) throw UserError("config: each series needs 'budgets'");
        s.finish();
        cfg.series.push_back(std::move(spec));
      }
    }
    c.finish();
  }

  if (!top.has("models")) throw UserError("config: 'models' is required");
  std::set<std::string> names;
  for (const auto& m : top.at("models")) {
    Section s(m, "models[]");
    ModelSpec spec;
    spec.order = s.get<int>("order", 3);
    spec.dim = s.get<int>("dim", 100);
    spec.window = s.get<int>("window", 5);
    spec.unk_threshold = s.get<std::size_t>("unk_threshold", 1);
    spec.name = s.get<std::string>("name", fmt::format("kn{}-d{}", spec.order, spec.dim));
    s.finish();
    if (spec.order < 1 || spec.order > 5) throw UserError("config: model order must be in [1, 5]");
    if (spec.dim < 1 || spec.window < 1) throw UserError("config: dim and window must be positive");
    if (!names.insert(spec.name).second) {
      throw UserError(fmt::format("config: duplicate model name '{}'", spec.name));
    }
    cfg.models.push_back(spec);
  }
  if (cfg.models.empty()) throw UserError("config: 'models' must not be empty");

  if (top.has("eval")) {
    Section e(top.at("eval"), "eval");
    for (const auto& p : string_list(e, "minimal_pairs", {})) {
      cfg.minimal_pairs.push_back(existing(base_dir, p, "eval.minimal_pairs"));
    }
    for (const auto& p : string_list(e, "word_similarity", {})) {
      cfg.word_similarity.push_back(existing(base_dir, p, "eval.word_similarity"));
    }
    cfg.vocab_filter = e.get<bool>("vocab_filter", true);
    e.finish();
  }

  if (top.has("features")) {
    Section f(top.at("features"), "features");
    auto& o = cfg.feature_options;
    o.mattr_window = f.get<std::size_t>("mattr_window", o.mattr_window);
    o.zipf_top_types = f.get<std::size_t>("zipf_top_types", o.zipf_top_types);
    o.divergence_alpha = f.get<double>("divergence_alpha", o.divergence_alpha);
    o.unintelligible = string_list(f, "unintelligible_markers", o.unintelligible);
    o.non_linguistic = string_list(f, "non_linguistic_markers", o.non_linguistic);
    o.wh_words = string_list(f, "wh_words", o.wh_words);
    cfg.feature_embedding_dim = f.get<int>("embedding_dim", cfg.feature_embedding_dim);
    if (f.has("pos_lexicon")) {
      cfg.pos_lexicon =
          existing(base_dir, f.get<std::string>("pos_lexicon", ""), "features.pos_lexicon");
    }
    f.finish();
    if (o.mattr_window == 0 || o.zipf_top_types < 2 || !(o.divergence_alpha > 0)) {
      throw UserError("config: features.mattr_window, zipf_top_types and divergence_alpha "
                      "must be positive (zipf_top_types >= 2)");
    }
  }

  if (top.has("analysis")) {
    Section a(top.at("analysis"), "analysis");
    auto& o = cfg.analysis;
    o.targets = string_list(a, "targets", o.targets);
    o.folds = a.get<std::size_t>("folds", o.folds);
    o.top_k = a.get<std::size_t>("top_k", o.top_k);
    o.min_rows = a.get<std::size_t>("min_rows", o.min_rows);
    o.lasso.grid_points = a.get<int>("lasso_grid_points", o.lasso.grid_points);
    o.lasso.solver.tolerance = a.get<double>("lasso_tolerance", o.lasso.solver.tolerance);
    o.lasso.solver.max_sweeps = a.get<int>("lasso_max_sweeps", o.lasso.solver.max_sweeps);
    o.gbt.rounds = a.get<int>("gbt_rounds", o.gbt.rounds);
    o.gbt.depth = a.get<int>("gbt_depth", o.gbt.depth);
    o.gbt.learning_rate = a.get<double>("gbt_learning_rate", o.gbt.learning_rate);
    a.finish();
    for (const auto& t : o.targets) {
      if (std::find(analysis::kRecordMetrics.begin(), analysis::kRecordMetrics.end(), t) ==
          analysis::kRecordMetrics.end()) {
        throw UserError(fmt::format("config: analysis target '{}' is not a recorded metric", t));
      }
    }
    if (o.folds < 2 || o.top_k == 0 || o.min_rows < 2 || o.lasso.grid_points < 2 ||
        !(o.lasso.solver.tolerance > 0) || o.lasso.solver.max_sweeps < 1 || o.gbt.rounds < 1 ||
        o.gbt.depth < 1 || !(o.gbt.learning_rate > 0)) {
      throw UserError("config: analysis settings out of range (folds >= 2, top_k >= 1, min_rows >= 2, "
                      "lasso_grid_points >= 2, positive lasso and gbt settings)");
    }
  }

  if (top.has("aoa")) {
    Section a(top.at("aoa"), "aoa");
    auto& o = cfg.aoa;
    if (a.has("cdi")) o.cdi = existing(base_dir, a.get<std::string>("cdi", ""), "aoa.cdi");
    o.model = a.get<std::string>("model", "");
    o.settings = string_list(a, "settings", o.settings);
    o.nll_corpus = a.get<std::string>("nll_corpus", o.nll_corpus);
    o.chunk_words = a.get<std::size_t>("chunk_words", o.chunk_words);
    if (a.has("scores")) {
      o.scores = existing(base_dir, a.get<std::string>("scores", ""), "aoa.scores");
    }
    a.finish();
    for (const auto& s : o.settings) {
      if (s != "individual" && s != "all" && s != "scores") {
        throw UserError(fmt::format("config: unknown aoa setting '{}'", s));
      }
      if (s == "scores" && !o.scores) throw UserError("config: aoa setting 'scores' needs aoa.scores");
    }
    if (o.nll_corpus != "own" && o.nll_corpus != "pooled") {
      throw UserError("config: aoa.nll_corpus must be 'own' or 'pooled'");
    }
    if (!o.model.empty()) cfg.model(o.model);
    if (o.chunk_words == 0) throw UserError("config: aoa.chunk_words must be positive");
  }
  top.finish();
  return cfg;
}

}  // namespace childlm::pipeline
