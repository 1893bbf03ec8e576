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

#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/pipeline/pipeline.hpp"

namespace childlm::pipeline {
namespace {

// Markdown table of the chosen columns; "" when the file is absent.
std::string markdown(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     std::size_t max_rows = 0) {
  if (!std::filesystem::exists(path)) return {};
  const auto t = read_csv_file(path);
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(t.require_column(c));
  std::ostringstream out;
  out << "|";
  for (const auto& c : columns) out << " " << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
  out << "\n";
  std::size_t n = 0;
  for (const auto& r : t.rows) {
    if (max_rows > 0 && n++ >= max_rows) break;
    out << "|";
    for (auto i : idx) {
      std::string v = r[i];
      if (const auto d = parse_double(v); d && v.find('.') != std::string::npos) {
        v = format_fixed(*d, 3);
      }
      out << " " << v << " |";
    }
    out << "\n";
  }
  if (t.rows.empty()) out << "\n(no rows)\n";
  return out.str();
}

}  // namespace

void cmd_report(const RunConfig& cfg) {
  const auto& dir = cfg.output_dir;
  std::ostringstream md;
  md << "<!-- " << cfg.provenance() << " -->\n";
  md << "# childlm report\n\n";
  struct Section {
    std::string title;
    std::string file;
    std::vector<std::string> columns;
    std::size_t max_rows = 0;
  };
  const std::vector<Section> sections = {
      {"Families", "families.csv", {"family_id", "child_age_months", "tokens", "types", "ttr"}},
      {"Conditions (mean over seeds)",
       "conditions.csv",
       {"dataset", "model", "tokens", "ttr", "seeds", "zorro_mean", "zorro_sd", "wordsim_mean",
        "wordsim_sd", "comps_mean", "comps_sd", "ewok_mean", "ewok_sd"}},
      {"Most frequent top features",
       "top_features.csv",
       {"feature", "category", "top_count", "method_count", "mean_rank"},
       15},
      {"Predictor cells",
       "predictor_cells.csv",
       {"model", "target", "n_rows", "lasso_alpha", "lasso_nonzero", "lasso_cv_r2", "gbt_cv_r2"}},
      {"Scaling slopes", "scaling_slopes.csv", {"model", "metric", "group", "n",
                                                "slope_per_log10_tokens"}},
      {"Scaling interactions",
       "scaling.csv",
       {"model", "metric", "reference_group", "term", "estimate", "p_value", "significant"}},
      {"Age of acquisition: frequency vs NLL",
       "aoa_comparison.csv",
       {"setting", "model", "n_words", "base_aic", "nll_aic", "delta_aic", "r_logfreq_nll"}},
  };
  std::size_t found = 0;
  for (const auto& s : sections) {
    const auto body = markdown(dir / s.file, s.columns, s.max_rows);
    if (body.empty()) continue;
    ++found;
    md << "## " << s.title << "\n\n" << body << "\n";
  }
  if (found == 0) {
    throw UserError(fmt::format("nothing to report in {}; run the other subcommands first",
                                dir.string()));
  }
  write_file_atomic(dir / "report.md", md.str());
  log_info(fmt::format("wrote {}", (dir / "report.md").string()));
}

}  // namespace childlm::pipeline
