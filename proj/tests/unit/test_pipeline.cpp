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

#include <cmath>
#include <json.hpp>
#include <map>

#include "childlm/common/io.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/common/stats.hpp"
#include "childlm/pipeline/config.hpp"
#include "childlm/pipeline/demo.hpp"
#include "childlm/pipeline/pipeline.hpp"
#include "doctest.h"
#include "testing.hpp"

namespace fs = std::filesystem;
using namespace childlm;
using namespace childlm::pipeline;
using childlm::testing::quote;
using childlm::testing::run_command;
using childlm::testing::TempDir;

namespace {

const std::string kCli = CHILDLM_CLI;

// Three small families, one fast model, no mixtures or series.
const std::vector<std::string> kSmall = {
    "conditions.all_families=false",
    "conditions.mixtures=[]",
    R"(models=[{"name":"kn2","order":2,"dim":16,"window":3}])",
    "aoa.model=kn2",
    "analysis.min_rows=2",
    "analysis.folds=2",
    "workers=2"};

std::string set_flags() {
  std::string out;
  for (const auto& s : kSmall) out += " --set " + quote(s);
  return out;
}

const fs::path& workspace() {
  static TempDir dir("pipeline");
  static const bool ready = [] {
    DemoOptions o;
    o.families = 3;
    o.min_family_tokens = 2500;
    o.max_family_tokens = 4000;
    o.series_tokens = 0;
    o.cdi_children = 100;
    write_demo_workspace(dir.path(), o);
    return true;
  }();
  (void)ready;
  return dir.path();
}

std::map<std::string, std::uint64_t> hash_tree(const fs::path& root) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).string()] = fnv1a64(read_text_file(e.path()));
    }
  }
  return out;
}

CsvTable table(const fs::path& p) { return read_csv_file(p); }

}  // namespace

TEST_CASE("config parsing, overrides and defaults") {
  const auto& ws = workspace();
  const auto text = read_text_file(ws / "config.json");
  const auto cfg = parse_config(text, ws);
  CHECK(cfg.seeds.size() == 5);
  CHECK(cfg.layout == corpus::TranscriptLayout::kSingleLine);
  CHECK(cfg.hash.size() == 16);
  CHECK(cfg.provenance() == "childlm 0.1.0 config=" + cfg.hash);

  const auto small = parse_config(text, ws, kSmall);
  CHECK(small.models.size() == 1);
  CHECK(small.models[0].order == 2);
  CHECK_FALSE(small.all_families);
  CHECK(small.analysis.folds == 2);
  CHECK(small.hash != cfg.hash);
  CHECK(parse_config(text, ws, kSmall).hash == small.hash);

  CHECK_THROWS_AS(parse_config(text, ws, {"colour=blue"}), UserError);
  CHECK_THROWS_AS(parse_config(text, ws, {"analysis.fold=3"}), UserError);
  CHECK_THROWS_AS(parse_config(text, ws, {"seeds=[1,1]"}), UserError);
  CHECK_THROWS_AS(parse_config(text, ws, {"noequals"}), UserError);
  CHECK_THROWS_AS(parse_config(text, ws, {"aoa.model=missing"}), UserError);
  CHECK_THROWS_AS(parse_config("{", ws), UserError);
  CHECK_THROWS_AS(parse_config(text, ws, {"manifest=nowhere.json"}), UserError);
  CHECK(parse_config(text, ws, {"transcripts.layout=blank_line"}).layout ==
        corpus::TranscriptLayout::kBlankLine);
}

TEST_CASE("conditions from families") {
  const auto& ws = workspace();
  const auto text = read_text_file(ws / "config.json");
  CHECK_THROWS_AS(build_conditions(parse_config(text, ws), load_families(parse_config(text, ws))),
                  UserError);
  const auto cfg = parse_config(text, ws, {R"(conditions.mixtures=[{"name":"top2","top":2}])"});
  const auto families = load_families(cfg);
  REQUIRE(families.size() == 3);
  const auto conds = build_conditions(cfg, families);
  // 3 individual, top2 and all.
  std::map<std::string, std::string> kinds;
  for (const auto& c : conds) kinds[c.name] = c.kind;
  CHECK(kinds.at("all") == "all");
  CHECK(kinds.at("top2") == "mixture");
  std::size_t individual = 0;
  for (const auto& [n, k] : kinds) individual += k == "individual";
  CHECK(individual == 3);
  std::size_t total = 0;
  for (const auto& f : families) total += f.token_count();
  for (const auto& c : conds) {
    if (c.kind == "all") CHECK(c.data.token_count() == total);
    if (c.kind == "mixture") {
      // Redrawn per seed but the budget stays close to the largest member.
      CHECK(condition_dataset(c, 1).token_count() > 0);
      CHECK(condition_dataset(c, 2).token_count() > 0);
    }
  }
}

TEST_CASE("cli exit codes") {
  CHECK(run_command(quote(kCli) + " --help").exit_code == 0);
  const auto bad = run_command(quote(kCli) + " frobnicate");
  CHECK(bad.exit_code == 1);
  const auto missing = run_command(quote(kCli) + " ingest -c /nonexistent/cfg.json");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("/nonexistent/cfg.json") != std::string::npos);

  TempDir dir("cli");
  write_file_atomic(dir / "bad.json", "{\"manifest\": \"m.json\"}");
  const auto no_manifest = run_command(quote(kCli) + " ingest -c " + quote(dir / "bad.json"));
  CHECK(no_manifest.exit_code == 1);
  CHECK(no_manifest.output.find("m.json") != std::string::npos);
}

TEST_CASE("end-to-end run is complete, consistent and reproducible") {
  const auto& ws = workspace();
  const std::string cfg = " -c " + quote(ws / "config.json") + set_flags();
  auto step = [&](const std::string& cmd) {
    const auto r = run_command(quote(kCli) + " -q " + cmd + cfg);
    INFO(cmd << ": " << r.output);
    REQUIRE(r.exit_code == 0);
  };
  for (const auto* cmd : {"ingest", "run", "features", "analyze"}) step(cmd);
  const fs::path out = ws / "out";

  const auto reg = nlohmann::json::parse(read_text_file(out / "registry.json"));
  CHECK(reg.at("families").size() == 3);

  const auto records = table(out / "records.csv");
  CHECK(records.rows.size() == 15);

  // Summary mean and sd recomputed from the per-seed records.
  const auto conds = table(out / "conditions.csv");
  REQUIRE(conds.rows.size() == 3);
  const auto rd = records.require_column("dataset");
  const auto rz = records.require_column("zorro");
  for (const auto& row : conds.rows) {
    std::vector<double> v;
    for (const auto& r : records.rows) {
      if (r[rd] == row[conds.require_column("dataset")]) v.push_back(*parse_double(r[rz]));
    }
    REQUIRE(v.size() == 5);
    CHECK(*parse_double(row[conds.require_column("zorro_mean")]) == doctest::Approx(mean(v)).epsilon(1e-12));
    CHECK(*parse_double(row[conds.require_column("zorro_sd")]) ==
          doctest::Approx(sample_sd(v)).epsilon(1e-12));
  }

  const auto plot = table(out / "plot_data.csv");
  REQUIRE_FALSE(plot.rows.empty());
  for (const auto& r : plot.rows) {
    const double tokens = *parse_double(r[plot.require_column("tokens")]);
    CHECK(*parse_double(r[plot.require_column("log10_tokens")]) ==
          doctest::Approx(std::log10(tokens)).epsilon(1e-12));
  }

  const auto features = table(out / "features.csv");
  CHECK(features.rows.size() == 3);

  const auto first = hash_tree(out);
  for (const auto* cmd : {"ingest", "run", "features", "analyze"}) step(cmd);
  const auto second = hash_tree(out);
  CHECK(first.size() == second.size());
  for (const auto& [file, h] : first) {
    INFO(file);
    CHECK(second.at(file) == h);
  }

  // An empty feature table stops analyze.
  const auto header = read_text_file(out / "features.csv");
  write_file_atomic(out / "features.csv", header.substr(0, header.find('\n', header.find('\n') + 1) + 1));
  const auto refused = run_command(quote(kCli) + " analyze" + cfg);
  CHECK(refused.exit_code == 1);
  CHECK(refused.output.find("feature table is empty") != std::string::npos);
}
