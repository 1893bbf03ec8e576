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

#include "childlm/pipeline/demo.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/corpus/manifest.hpp"
#include "childlm/corpus/transcript.hpp"
#include "childlm/eval/items.hpp"
#include "childlm/synth/generator.hpp"

namespace childlm::pipeline {
namespace {

namespace fs = std::filesystem;

void write_conversations(const fs::path& path, const std::vector<corpus::Conversation>& convs) {
  std::ostringstream out;
  corpus::write_transcripts(out, convs);
  write_file_atomic(path, out.str());
}

std::vector<eval::RawPair> raw(const std::vector<synth::PairSpec>& specs) {
  std::vector<eval::RawPair> out;
  for (const auto& s : specs) out.push_back({s.id, s.benchmark, s.subtask, s.good, s.bad});
  return out;
}

}  // namespace

std::vector<aoa::CdiObservation> simulate_cdi_observations(double b0, double b_age,
                                                           std::size_t children, int min_age,
                                                           int max_age, std::uint64_t seed) {
  Rng ages(derive_seed(seed, "ages"));
  Rng draws(derive_seed(seed, "production"));
  std::map<int, std::pair<long, long>> by_age;  // producing, total
  for (std::size_t c = 0; c < children; ++c) {
    const int age =
        min_age + static_cast<int>(ages.index(static_cast<std::uint64_t>(max_age - min_age + 1)));
    const double p = 1.0 / (1.0 + std::exp(-(b0 + b_age * age)));
    auto& cell = by_age[age];
    cell.first += draws.bernoulli(p) ? 1 : 0;
    cell.second += 1;
  }
  std::vector<aoa::CdiObservation> out;
  for (const auto& [age, cell] : by_age) {
    out.push_back({static_cast<double>(age), cell.first, cell.second});
  }
  return out;
}

void write_demo_workspace(const fs::path& dir, const DemoOptions& opts) {
  if (opts.families < 2) throw UserError("the demo needs at least 2 families");
  if (opts.min_family_tokens == 0 || opts.min_family_tokens > opts.max_family_tokens) {
    throw UserError("demo family token range is empty");
  }
  const fs::path data = dir / "data";
  const fs::path suites = dir / "suites";
  fs::create_directories(data);
  fs::create_directories(suites);
  const synth::Generator gen(opts.seed);
  Rng rng(derive_seed(opts.seed, "demo"));

  std::vector<corpus::ManifestEntry> manifest;
  std::map<std::string, std::size_t> pooled;
  const double lo = std::log(static_cast<double>(opts.min_family_tokens));
  const double hi = std::log(static_cast<double>(opts.max_family_tokens));
  for (const auto& fam : synth::Generator::families(opts.families, opts.seed)) {
    const auto tokens = static_cast<std::size_t>(std::exp(rng.uniform(lo, hi)));
    const auto convs = gen.conversations(fam, tokens, derive_seed(opts.seed, fam.family_id));
    for (const auto& c : convs) {
      for (const auto& u : c.utterances) {
        for (const auto& t : u.tokens) ++pooled[t];
      }
    }
    const auto file = fam.family_id + ".txt";
    write_conversations(data / file, convs);
    manifest.push_back({file, fam.family_id, fam.child_age_months});
  }
  corpus::write_manifest(data / "manifest.json", manifest);

  if (opts.series_tokens > 0) {
    synth::FamilyProfile rich;
    rich.family_id = "td";
    rich.child_age_months = 30;
    rich.topic_focus = 0.5;
    rich.question_rate = 0.35;
    rich.child_share = 0.35;
    rich.expansion_rate = 0.4;
    rich.marker_rate = 0.0;
    rich.rare_word_rate = 0.35;
    rich.mean_utterances = 16;
    rich.style_seed = derive_seed(opts.seed, "series-style");
    write_conversations(data / "td.txt",
                        gen.conversations(rich, opts.series_tokens,
                                          derive_seed(opts.seed, "series")));
  }

  eval::write_minimal_pairs(suites / "zorro.jsonl", raw(gen.grammar_suite(40, opts.seed)));
  eval::write_minimal_pairs(suites / "comps.jsonl", raw(gen.property_suite(20, opts.seed)));
  eval::write_minimal_pairs(suites / "ewok.jsonl", raw(gen.plausibility_suite(15, opts.seed)));
  eval::WordPairSuite sim{"wordsim", {}};
  for (const auto& p : gen.similarity_suite(150, opts.seed)) {
    sim.pairs.push_back({p.word1, p.word2, p.score});
  }
  eval::write_word_pairs(suites / "wordsim.tsv", sim);

  // Generating AoA falls with corpus frequency and concreteness.
  std::vector<aoa::CdiWord> cdi;
  Rng noise(derive_seed(opts.seed, "cdi"));
  for (const auto& w : gen.cdi_words()) {
    const auto it = pooled.find(w.word);
    const double count = it == pooled.end() ? 0.0 : static_cast<double>(it->second);
    double aoa = 33.0 - 2.2 * std::log1p(count) - 1.5 * (w.concreteness - 3.0) + noise.normal(0, 1);
    aoa = std::clamp(aoa, 12.0, 34.0);
    const double slope = std::max(0.15, noise.normal(0.3, 0.03));
    cdi.push_back({w.word, static_cast<aoa::LexicalCategory>(static_cast<int>(w.category)),
                   w.concreteness,
                   simulate_cdi_observations(-aoa * slope, slope, opts.cdi_children, 8, 36,
                                             derive_seed(opts.seed, "cdi/" + w.word))});
  }
  aoa::write_cdi_csv(dir / "cdi.csv", cdi, fmt::format("childlm {} synthetic CDI", kVersion));

  nlohmann::ordered_json cfg;
  cfg["manifest"] = "data/manifest.json";
  cfg["output_dir"] = "out";
  cfg["seeds"] = {1, 2, 3, 4, 5};
  cfg["workers"] = 2;
  cfg["split_ratio"] = 0.85;
  nlohmann::ordered_json conditions;
  conditions["individual"] = true;
  conditions["mixtures"] = nlohmann::ordered_json::array(
      {{{"name", "top2"}, {"top", 2}}, {{"name", "top4"}, {"top", 4}}});
  conditions["all_families"] = true;
  if (opts.series_tokens > 0) {
    const std::size_t b = opts.series_tokens / 10;
    conditions["series"] = nlohmann::ordered_json::array(
        {{{"name", "td"}, {"transcripts", "data/td.txt"}, {"budgets", {b, 3 * b, 9 * b}}}});
  }
  cfg["conditions"] = conditions;
  cfg["models"] = nlohmann::ordered_json::array(
      {{{"name", "kn2-d32"}, {"order", 2}, {"dim", 32}, {"window", 5}},
       {{"name", "kn3-d64"}, {"order", 3}, {"dim", 64}, {"window", 5}}});
  cfg["eval"] = {{"minimal_pairs", {"suites/zorro.jsonl", "suites/comps.jsonl", "suites/ewok.jsonl"}},
                 {"word_similarity", {"suites/wordsim.tsv"}},
                 {"vocab_filter", true}};
  cfg["features"] = {{"mattr_window", 50}, {"zipf_top_types", 1000}, {"embedding_dim", 32}};
  cfg["analysis"] = {{"targets", {"zorro", "comps", "wordsim"}}, {"folds", 5}, {"top_k", 10},
                     {"min_rows", 5}};
  cfg["aoa"] = {{"cdi", "cdi.csv"},
                {"model", "kn3-d64"},
                {"settings", {"individual", "all"}},
                {"nll_corpus", "own"},
                {"chunk_words", 180}};
  write_file_atomic(dir / "config.json", cfg.dump(2) + "\n");
  log_info(fmt::format("demo workspace written to {}", dir.string()));
}

}  // namespace childlm::pipeline
