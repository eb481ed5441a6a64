// Copyright 2026 The segjudge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Repeatability and sensitivity tables built from a run set, plus their
// delimited-text renderings. Undefined statistics stay undefined and are
// written as an em dash sentinel.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "segjudge/metrics.hpp"
#include "segjudge/run_store.hpp"

namespace segjudge {

struct RepeatabilityRow {
  /// "fog-2", or just "fog" when severities are pooled.
  std::string label;
  int n = 0;  // complete groups
  int runs = 0;
  int incomplete = 0;
  int failed_records = 0;
  // Fractions in [0,1]; rendered as percentages.
  MaybeStat confidence_agreement;
  MaybeStat score_agreement;
  MaybeStat icc;
  MaybeStat conf_std_mean;
  MaybeStat conf_std_p95;
  MaybeStat text_overlap;
  MaybeStat combined;
};

struct RepeatabilityReport {
  std::vector<RepeatabilityRow> rows;
  std::vector<IncompleteGroup> incomplete;
};

/// One row per condition, or per family when `pool_severities` is set (each
/// (image, severity) group then counts as one sample of its family).
RepeatabilityReport build_repeatability_report(const RunSet& set, const Tolerance& tol = {},
                                               const ConditionFilter& filter = {},
                                               bool pool_severities = false);

/// One paired test on one residual column; undefined when n < 6.
struct CellTest {
  std::string test_name = "n/a";
  MaybeStat statistic;
  MaybeStat p_value;
  MaybeStat t_statistic;
  MaybeStat t_p_value;
  MaybeStat w_plus;
  MaybeStat wilcoxon_p_value;
  MaybeStat jb_statistic;
  MaybeStat jb_p_value;
};

struct SensitivityRow {
  Condition condition = Condition::clean();
  MaybeStat mean_ds, std_ds, ci95_ds_lo, ci95_ds_hi;
  MaybeStat mean_dc, std_dc, ci95_dc_lo, ci95_dc_hi;
  MaybeStat dz_score, dz_conf;
  int n = 0;  // pooled (image, run) residuals
  int images_paired = 0;
  int images_excluded = 0;
  CellTest test_ds;
  CellTest test_dc;
};

struct FamilyTrend {
  Family family = Family::Fog;
  MaybeStat rho_score;
  MaybeStat rho_conf;
};

struct SensitivityReport {
  std::vector<SensitivityRow> rows;
  std::vector<FamilyTrend> trends;
};

/// Pairs every corrupted condition in the set with clean. Throws
/// IncompleteData when the set holds no clean records or a corrupted
/// condition has no paired residuals.
SensitivityReport build_sensitivity_report(const RunSet& set);
SensitivityReport sensitivity_from_cells(const PairedResiduals& cells);

// Column orders are fixed so downstream tooling can rely on them.
std::vector<std::string> repeatability_columns();
std::vector<std::string> sensitivity_columns();
std::vector<std::string> plot_columns();

std::string render_repeatability_csv(const RepeatabilityReport& report);
std::string render_sensitivity_csv(const SensitivityReport& report);
std::string render_spearman_csv(const SensitivityReport& report);
/// Severity curve for one family: severity, mean_ds, mean_dc,
/// dz_score, dz_conf.
std::string render_plot_csv(const SensitivityReport& report, Family family);

/// Method choices and campaign provenance, so reports are only compared
/// within one configuration.
nlohmann::ordered_json report_metadata(const CampaignMeta& meta, const Tolerance& tol);

/// Human-readable summary for the terminal.
std::string summarize(const RepeatabilityReport& report);
std::string summarize(const SensitivityReport& report);

}  // namespace segjudge
