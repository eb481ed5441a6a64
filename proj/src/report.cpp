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

#include "segjudge/report.hpp"

#include <set>
#include <sstream>

#include "segjudge/csv.hpp"

namespace segjudge {

using stats::format_fixed;
using stats::format_general;

namespace {

/// Evaluates f(), mapping the "not enough data" errors to undefined.
template <typename F>
MaybeStat guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::EmptyInput:
      case ErrorCode::EmptyCell:
      case ErrorCode::TooFewSamples:
      case ErrorCode::DegenerateInput:
        return std::nullopt;
      default:
        throw;
    }
  }
}

MaybeStat percent(const MaybeStat& fraction) {
  if (!fraction) return std::nullopt;
  return *fraction * 100.0;
}

CellTest run_cell_test(const std::vector<double>& values) {
  CellTest out;
  if (values.size() < kPairedTestMinN) return out;
  const PairedTestResult r = paired_test(values);
  out.test_name = r.test_name;
  out.statistic = r.statistic;
  out.p_value = r.p_value;
  out.t_statistic = r.t_test.statistic;
  out.t_p_value = r.t_test.p_value;
  out.w_plus = r.wilcoxon.w_plus;
  out.wilcoxon_p_value = r.wilcoxon.p_value;
  out.jb_statistic = r.normality.statistic;
  out.jb_p_value = r.normality.p_value;
  return out;
}

void append_test_fields(std::vector<std::string>& fields, const CellTest& t) {
  fields.push_back(t.test_name);
  fields.push_back(format_general(t.statistic));
  fields.push_back(format_general(t.p_value));
  fields.push_back(format_general(t.t_statistic));
  fields.push_back(format_general(t.t_p_value));
  fields.push_back(format_general(t.w_plus));
  fields.push_back(format_general(t.wilcoxon_p_value));
  fields.push_back(format_general(t.jb_statistic));
  fields.push_back(format_general(t.jb_p_value));
}

std::string lines(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::string out = csv::join(header) + "\n";
  for (const auto& r : rows) out += csv::join(r) + "\n";
  return out;
}

}  // namespace

RepeatabilityReport build_repeatability_report(const RunSet& set, const Tolerance& tol,
                                               const ConditionFilter& filter,
                                               bool pool_severities) {
  const GroupedRuns grouped = group_runs(set, filter);
  // Pooled rows are keyed by the family's severity-1 condition (clean for
  // clean) so that they keep the usual condition ordering.
  const auto key_of = [&](const Condition& c) {
    return pool_severities && !c.is_clean() ? Condition(c.family(), 1) : c;
  };
  const auto label_of = [&](const Condition& c) {
    return pool_severities ? std::string(family_name(c.family())) : encode_condition(c);
  };
  std::map<Condition, std::vector<RunGroup>> by_condition;
  std::set<Condition> conditions;
  for (const auto& g : grouped.complete) {
    by_condition[key_of(g.condition)].push_back(g);
    conditions.insert(key_of(g.condition));
  }
  std::map<Condition, int> incomplete;
  for (const auto& g : grouped.incomplete) {
    ++incomplete[key_of(g.condition)];
    conditions.insert(key_of(g.condition));
  }
  std::map<Condition, int> failed;
  for (const auto& r : set.records) {
    if (!r.ok() && (!filter || filter(r.condition))) ++failed[key_of(r.condition)];
  }

  RepeatabilityReport report;
  report.incomplete = grouped.incomplete;
  for (const Condition& c : conditions) {
    const auto& groups = by_condition[c];
    const ScoreTuples scores = score_tuples(groups);
    const ConfidenceTuples confs = confidence_tuples(groups);
    const TextTuples texts = explanation_tuples(groups);

    RepeatabilityRow row;
    row.label = label_of(c);
    row.n = static_cast<int>(groups.size());
    row.runs = set.meta.runs;
    row.incomplete = incomplete[c];
    row.failed_records = failed[c];
    row.score_agreement = guarded([&] { return MaybeStat(score_agreement(scores)); });
    row.confidence_agreement =
        guarded([&] { return MaybeStat(confidence_agreement(confs, tol)); });
    row.combined = guarded([&] { return MaybeStat(combined_stability(scores, confs, tol)); });
    row.icc = guarded([&] { return icc_1_1(scores); });
    const auto spread = [&]() -> std::optional<SpreadSummary> {
      try {
        return confidence_std_summary(confs);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyInput || e.code() == ErrorCode::TooFewSamples) {
          return std::nullopt;
        }
        throw;
      }
    }();
    if (spread) {
      row.conf_std_mean = spread->mean;
      row.conf_std_p95 = spread->p95;
    }
    row.text_overlap = guarded([&] { return MaybeStat(text_overlap(texts)); });
    report.rows.push_back(std::move(row));
  }
  return report;
}

SensitivityReport sensitivity_from_cells(const PairedResiduals& cells) {
  SensitivityReport report;
  std::map<Family, std::array<MaybeStat, 3>> ds_by_family;
  std::map<Family, std::array<MaybeStat, 3>> dc_by_family;

  for (const auto& [cond, cell] : cells) {
    const auto ds = cell.score_residuals();
    const auto dc = cell.confidence_residuals();
    SensitivityRow row;
    row.condition = cond;
    row.n = static_cast<int>(cell.residuals.size());
    row.images_paired = cell.images_paired;
    row.images_excluded = cell.images_excluded;
    if (!cell.residuals.empty()) {
      const MeanDeviations md = mean_deviations(cell.residuals);
      row.mean_ds = md.score;
      row.mean_dc = md.confidence;
    }
    if (ds.size() >= 2) {
      const Dispersion s = dispersion_and_ci(ds);
      const Dispersion c = dispersion_and_ci(dc);
      row.std_ds = s.std;
      row.ci95_ds_lo = s.ci_lo;
      row.ci95_ds_hi = s.ci_hi;
      row.std_dc = c.std;
      row.ci95_dc_lo = c.ci_lo;
      row.ci95_dc_hi = c.ci_hi;
      row.dz_score = cohens_dz(ds);
      row.dz_conf = cohens_dz(dc);
    }
    row.test_ds = run_cell_test(ds);
    row.test_dc = run_cell_test(dc);
    if (!cond.is_clean()) {
      ds_by_family[cond.family()][static_cast<std::size_t>(cond.severity() - 1)] = row.mean_ds;
      dc_by_family[cond.family()][static_cast<std::size_t>(cond.severity() - 1)] = row.mean_dc;
    }
    report.rows.push_back(std::move(row));
  }

  const auto rho = [](const std::array<MaybeStat, 3>& drops) -> MaybeStat {
    std::array<double, 3> values{};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!drops[i]) return std::nullopt;
      values[i] = *drops[i];
    }
    return spearman_severity(values);
  };
  for (const auto& [family, drops] : ds_by_family) {
    report.trends.push_back({family, rho(drops), rho(dc_by_family[family])});
  }
  return report;
}

SensitivityReport build_sensitivity_report(const RunSet& set) {
  const bool has_clean = std::any_of(set.records.begin(), set.records.end(),
                                     [](const RunRecord& r) { return r.condition.is_clean(); });
  if (!has_clean) throw Error(ErrorCode::IncompleteData, "no clean campaign to pair against");
  const PairedResiduals cells = pair_with_clean(set);
  if (cells.empty()) throw Error(ErrorCode::IncompleteData, "no corrupted conditions in store");
  std::string missing;
  for (const auto& [cond, cell] : cells) {
    if (cell.residuals.empty()) missing += (missing.empty() ? "" : ", ") + encode_condition(cond);
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::IncompleteData, "no paired residuals for: " + missing);
  }
  return sensitivity_from_cells(cells);
}

std::vector<std::string> repeatability_columns() {
  return {"condition",          "N",
          "R",                  "incomplete",
          "failed_records",     "confidence_agreement_pct",
          "score_agreement_pct", "icc_1_1",
          "conf_std_mean",      "conf_std_p95",
          "text_overlap_pct",   "combined_stability_pct"};
}

std::vector<std::string> sensitivity_columns() {
  std::vector<std::string> cols = {"corruption", "severity",   "mean_ds",    "std_ds",
                                   "ci95_ds_lo", "ci95_ds_hi", "mean_dc",    "std_dc",
                                   "ci95_dc_lo", "ci95_dc_hi", "dz_score",   "dz_conf",
                                   "n",          "images_paired", "images_excluded"};
  for (const char* side : {"ds", "dc"}) {
    for (const char* f : {"test", "statistic", "p_value", "t_statistic", "t_p_value",
                          "wilcoxon_w_plus", "wilcoxon_p_value", "jb_statistic",
                          "jb_p_value"}) {
      cols.push_back(std::string(f) + "_" + side);
    }
  }
  return cols;
}

std::vector<std::string> plot_columns() {
  return {"severity", "mean_ds", "mean_dc", "dz_score", "dz_conf"};
}

std::string render_repeatability_csv(const RepeatabilityReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    rows.push_back({r.label, std::to_string(r.n), std::to_string(r.runs),
                    std::to_string(r.incomplete), std::to_string(r.failed_records),
                    format_fixed(percent(r.confidence_agreement), 2),
                    format_fixed(percent(r.score_agreement), 2), format_fixed(r.icc, 3),
                    format_fixed(r.conf_std_mean, 4), format_fixed(r.conf_std_p95, 4),
                    format_fixed(percent(r.text_overlap), 2),
                    format_fixed(percent(r.combined), 2)});
  }
  return lines(repeatability_columns(), rows);
}

std::string render_sensitivity_csv(const SensitivityReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    std::vector<std::string> f = {
        std::string(family_name(r.condition.family())), std::to_string(r.condition.severity()),
        format_fixed(r.mean_ds, 3),    format_fixed(r.std_ds, 3),
        format_fixed(r.ci95_ds_lo, 3), format_fixed(r.ci95_ds_hi, 3),
        format_fixed(r.mean_dc, 3),    format_fixed(r.std_dc, 3),
        format_fixed(r.ci95_dc_lo, 3), format_fixed(r.ci95_dc_hi, 3),
        format_fixed(r.dz_score, 3),   format_fixed(r.dz_conf, 3),
        std::to_string(r.n),           std::to_string(r.images_paired),
        std::to_string(r.images_excluded)};
    append_test_fields(f, r.test_ds);
    append_test_fields(f, r.test_dc);
    rows.push_back(std::move(f));
  }
  return lines(sensitivity_columns(), rows);
}

std::string render_spearman_csv(const SensitivityReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : report.trends) {
    rows.push_back({std::string(family_name(t.family)), format_fixed(t.rho_score, 3),
                    format_fixed(t.rho_conf, 3)});
  }
  return lines({"corruption", "spearman_rho_score", "spearman_rho_conf"}, rows);
}

std::string render_plot_csv(const SensitivityReport& report, Family family) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    if (r.condition.family() != family) continue;
    rows.push_back({std::to_string(r.condition.severity()), format_fixed(r.mean_ds, 6),
                    format_fixed(r.mean_dc, 6), format_fixed(r.dz_score, 6),
                    format_fixed(r.dz_conf, 6)});
  }
  return lines(plot_columns(), rows);
}

nlohmann::ordered_json report_metadata(const CampaignMeta& meta, const Tolerance& tol) {
  nlohmann::ordered_json j;
  j["judge_id"] = meta.judge_id;
  j["prompt_hash"] = meta.prompt_hash;
  j["runs"] = meta.runs;
  j["backend"] = meta.backend;
  j["started_at"] = meta.started_at;
  j["settings"] = meta.settings;
  j["methods"] = {
      {"confidence_epsilon", tol.epsilon},
      {"tokenization", "lowercase ascii, split on non-alphanumeric, token sets, pairwise jaccard (v1)"},
      {"icc", "ICC(1,1) from one-way ANOVA mean squares"},
      {"percentile", "nearest rank"},
      {"mean_deviation", "per-run means averaged across runs"},
      {"residual_pooling", "std, ci95 and dz over pooled (image, run) residuals"},
      {"pairing", "same run index on both sides"},
      {"ci", "student t, 0.975 quantile by bisection on the incomplete beta cdf"},
      {"normality", "jarque-bera, alpha 0.05, p = exp(-JB/2)"},
      {"paired_test", "per cell; t-test if normal, else wilcoxon signed-rank (exact n <= 12)"},
      {"denominators", "complete R-run groups only; failed records reported separately"},
      {"undefined", stats::kUndefined}};
  return j;
}

std::string summarize(const RepeatabilityReport& report) {
  std::ostringstream os;
  for (const auto& r : report.rows) {
    os << r.label << ": N=" << r.n << " A_s="
       << format_fixed(percent(r.score_agreement), 2) << "% A_c="
       << format_fixed(percent(r.confidence_agreement), 2) << "% A_sc="
       << format_fixed(percent(r.combined), 2) << "% ICC=" << format_fixed(r.icc, 3)
       << " text=" << format_fixed(percent(r.text_overlap), 2) << "%";
    if (r.incomplete > 0) os << " incomplete=" << r.incomplete;
    os << "\n";
  }
  return os.str();
}

std::string summarize(const SensitivityReport& report) {
  std::ostringstream os;
  for (const auto& r : report.rows) {
    os << encode_condition(r.condition) << ": mean_ds=" << format_fixed(r.mean_ds, 3)
       << " mean_dc=" << format_fixed(r.mean_dc, 3) << " dz_score=" << format_fixed(r.dz_score, 3)
       << " " << r.test_ds.test_name << " p=" << format_general(r.test_ds.p_value) << "\n";
  }
  for (const auto& t : report.trends) {
    os << family_name(t.family) << ": rho=" << format_fixed(t.rho_score, 3) << "\n";
  }
  return os.str();
}

}  // namespace segjudge
