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

#include <fmt/format.h>

#include <algorithm>
#include <json.hpp>
#include <map>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/corpus/manifest.hpp"
#include "childlm/corpus/sampling.hpp"
#include "childlm/corpus/transcript.hpp"
#include "childlm/pipeline/pipeline.hpp"
#include "table.hpp"

namespace childlm::pipeline {
namespace {

std::vector<corpus::Conversation> read_checked(const std::filesystem::path& path,
                                               const corpus::TranscriptOptions& opts,
                                               std::vector<std::string>& problems) {
  if (!std::filesystem::exists(path)) {
    problems.push_back(fmt::format("{}: file not found", path.string()));
    return {};
  }
  auto result = corpus::read_transcript_file(path, opts);
  for (const auto& w : result.warnings) log_warning(fmt::format("{}: {}", path.string(), w));
  for (const auto& e : result.errors) {
    problems.push_back(fmt::format("{}:{}: record {}: {}", path.string(), e.line,
                                   e.record_index, e.message));
  }
  return std::move(result.conversations);
}

void raise_problems(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  std::string msg = fmt::format("{} malformed input location(s):", problems.size());
  for (const auto& p : problems) msg += "\n  " + p;
  throw UserError(msg);
}

}  // namespace

corpus::Dataset condition_dataset(const Condition& c, std::uint64_t seed) {
  if (c.sources.empty()) return c.data;
  return corpus::build_mixture(c.sources, c.budget, derive_seed(seed, c.kind + "/" + c.name),
                               c.name);
}

std::vector<corpus::Dataset> load_families(const RunConfig& cfg) {
  const auto entries = corpus::read_manifest(cfg.manifest);
  std::vector<std::string> order;
  std::map<std::string, std::vector<corpus::Conversation>> by_family;
  std::vector<std::string> problems;
  for (const auto& e : entries) {
    corpus::TranscriptOptions opts;
    opts.layout = cfg.layout;
    opts.aliases = cfg.aliases;
    opts.family_id = e.family_id;
    opts.child_age_months = e.child_age_months;
    auto convs = read_checked(e.path, opts, problems);
    if (!by_family.contains(e.family_id)) order.push_back(e.family_id);
    auto& dst = by_family[e.family_id];
    std::move(convs.begin(), convs.end(), std::back_inserter(dst));
  }
  raise_problems(problems);
  std::vector<corpus::Dataset> out;
  for (const auto& id : order) {
    if (by_family[id].empty()) {
      log_warning(fmt::format("family '{}' has no conversations; left out", id));
      continue;
    }
    out.emplace_back(id, std::move(by_family[id]));
  }
  if (out.empty()) throw UserError(fmt::format("{}: no conversations found", cfg.manifest.string()));
  return out;
}

std::vector<Condition> build_conditions(const RunConfig& cfg,
                                        const std::vector<corpus::Dataset>& families) {
  std::vector<Condition> out;
  std::set<std::string> names;
  auto add = [&](Condition c) {
    if (!names.insert(c.name).second) {
      throw UserError(fmt::format("two conditions are named '{}'", c.name));
    }
    if (!c.sources.empty()) c.data = condition_dataset(c, cfg.seeds.front());
    out.push_back(std::move(c));
  };
  if (cfg.individual) {
    for (const auto& f : families) add({f.name(), "individual", "family", f, {}, 0});
  }
  std::vector<const corpus::Dataset*> by_size;
  for (const auto& f : families) by_size.push_back(&f);
  std::stable_sort(by_size.begin(), by_size.end(), [](const auto* a, const auto* b) {
    if (a->token_count() != b->token_count()) return a->token_count() > b->token_count();
    return a->name() < b->name();
  });
  for (const auto& m : cfg.mixtures) {
    std::vector<corpus::Dataset> members;
    if (m.top > 0) {
      if (m.top > families.size()) {
        throw UserError(fmt::format("mixture '{}' wants the top {} families but only {} exist",
                                    m.name, m.top, families.size()));
      }
      for (std::size_t i = 0; i < m.top; ++i) members.push_back(*by_size[i]);
    } else {
      for (const auto& id : m.families) {
        const auto it = std::find_if(families.begin(), families.end(),
                                     [&](const auto& f) { return f.name() == id; });
        if (it == families.end()) {
          throw UserError(fmt::format("mixture '{}' names unknown family '{}'", m.name, id));
        }
        members.push_back(*it);
      }
    }
    std::size_t budget = m.budget;
    if (budget == 0) {
      for (const auto& f : members) budget = std::max(budget, f.token_count());
    }
    add({m.name, "mixture", "family", {}, std::move(members), budget});
  }
  if (cfg.all_families) add({"all", "all", "family", corpus::concatenate("all", families), {}, 0});
  for (const auto& s : cfg.series) {
    corpus::TranscriptOptions opts;
    opts.layout = cfg.layout;
    opts.aliases = cfg.aliases;
    opts.family_id = s.name;
    std::vector<std::string> problems;
    auto convs = read_checked(s.transcripts, opts, problems);
    raise_problems(problems);
    corpus::Dataset source(s.name, std::move(convs));
    for (const auto budget : s.budgets) {
      if (budget > source.token_count()) {
        throw UserError(fmt::format("series '{}' has {} tokens, fewer than the budget {}", s.name,
                                    source.token_count(), budget));
      }
      const std::string name = fmt::format("{}-{}", s.name, budget);
      add({name, "series", s.name, {}, {source}, budget});
    }
  }
  if (out.empty()) throw UserError("the config enables no conditions");
  return out;
}

void cmd_ingest(const RunConfig& cfg) {
  const auto families = load_families(cfg);
  const auto entries = corpus::read_manifest(cfg.manifest);
  Table table({{"family_id", false},
               {"child_age_months", true},
               {"conversations", true},
               {"utterances", true},
               {"tokens", true},
               {"types", true},
               {"ttr", true},
               {"rank_by_tokens", true}});
  std::vector<std::size_t> rank(families.size());
  {
    std::vector<std::size_t> idx(families.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (families[a].token_count() != families[b].token_count()) {
        return families[a].token_count() > families[b].token_count();
      }
      return families[a].name() < families[b].name();
    });
    for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r + 1;
  }
  nlohmann::ordered_json reg;
  reg["provenance"] = nlohmann::ordered_json::parse(cfg.provenance_json());
  reg["manifest"] = cfg.manifest.lexically_relative(cfg.base_dir).generic_string();
  auto& fam = reg["families"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto& f = families[i];
    std::optional<int> age;
    std::vector<std::string> files;
    for (const auto& e : entries) {
      if (e.family_id != f.name()) continue;
      if (!age) age = e.child_age_months;
      files.push_back(e.path.lexically_relative(cfg.base_dir).generic_string());
    }
    table.add({f.name(), age ? std::to_string(*age) : "NA",
               std::to_string(f.conversations().size()), std::to_string(f.utterance_count()),
               std::to_string(f.token_count()), std::to_string(f.vocabulary().size()),
               cell(corpus::ttr(f)), std::to_string(rank[i])});
    nlohmann::ordered_json row;
    row["family_id"] = f.name();
    row["files"] = files;
    row["child_age_months"] = age ? nlohmann::ordered_json(*age) : nlohmann::ordered_json();
    row["conversations"] = f.conversations().size();
    row["utterances"] = f.utterance_count();
    row["tokens"] = f.token_count();
    row["types"] = f.vocabulary().size();
    row["ttr"] = corpus::ttr(f);
    row["rank_by_tokens"] = rank[i];
    fam.push_back(std::move(row));
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_json(cfg.output_dir / "registry.json", reg.dump(2) + "\n");
  table.write(cfg.output_dir, "families", cfg);
  log_info(fmt::format("ingested {} families from {}", families.size(), cfg.manifest.string()));
}

}  // namespace childlm::pipeline
