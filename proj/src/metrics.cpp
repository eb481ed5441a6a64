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

#include "segjudge/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "segjudge/error.hpp"

namespace segjudge {

using stats::CompensatedSum;

namespace {

template <typename T>
void require_tuples(std::span<const std::vector<T>> groups, const char* what) {
  if (groups.empty()) throw Error(ErrorCode::EmptyInput, std::string(what) + ": no groups");
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw Error(ErrorCode::TooFewSamples,
                  std::string(what) + ": every group needs R >= 2 runs");
    }
  }
}

bool score_stable(const std::vector<int>& g) {
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  return *hi - *lo == 0;
}

bool confidence_stable(const std::vector<double>& g, double eps) {
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  return *hi - *lo <= eps;
}

std::vector<double> to_doubles(const std::vector<int>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

double score_agreement(std::span<const std::vector<int>> groups) {
  require_tuples(groups, "score_agreement");
  const auto stable = std::count_if(groups.begin(), groups.end(), score_stable);
  return static_cast<double>(stable) / static_cast<double>(groups.size());
}

double confidence_agreement(std::span<const std::vector<double>> groups,
                            const Tolerance& tol) {
  require_tuples(groups, "confidence_agreement");
  if (!(tol.epsilon >= 0.0)) throw Error(ErrorCode::InvalidSpec, "epsilon must be >= 0");
  const auto stable = std::count_if(groups.begin(), groups.end(), [&](const auto& g) {
    return confidence_stable(g, tol.epsilon);
  });
  return static_cast<double>(stable) / static_cast<double>(groups.size());
}

double combined_stability(std::span<const std::vector<int>> scores,
                          std::span<const std::vector<double>> confidences,
                          const Tolerance& tol) {
  require_tuples(scores, "combined_stability");
  require_tuples(confidences, "combined_stability");
  if (scores.size() != confidences.size()) {
    throw Error(ErrorCode::MisalignedGroups, "score and confidence group counts differ");
  }
  std::size_t both = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != confidences[i].size()) {
      throw Error(ErrorCode::MisalignedGroups,
                  "group " + std::to_string(i) + " has mismatched run counts");
    }
    if (score_stable(scores[i]) && confidence_stable(confidences[i], tol.epsilon)) ++both;
  }
  return static_cast<double>(both) / static_cast<double>(scores.size());
}

MaybeStat icc_1_1(std::span<const std::vector<int>> matrix) {
  if (matrix.size() < 2) {
    throw Error(ErrorCode::DegenerateInput, "ICC needs at least two images");
  }
  const std::size_t runs = matrix.front().size();
  if (runs < 2) throw Error(ErrorCode::DegenerateInput, "ICC needs at least two runs");
  for (const auto& row : matrix) {
    if (row.size() != runs) {
      throw Error(ErrorCode::DegenerateInput, "ICC matrix has missing cells");
    }
  }
  const double n = static_cast<double>(matrix.size());
  const double r = static_cast<double>(runs);

  std::vector<double> row_means;
  row_means.reserve(matrix.size());
  CompensatedSum grand;
  for (const auto& row : matrix) {
    const auto values = to_doubles(row);
    row_means.push_back(stats::mean(values));
    grand.add(stats::sum(values));
  }
  const double grand_mean = grand.value() / (n * r);

  CompensatedSum between, within;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const double dm = row_means[i] - grand_mean;
    between.add(dm * dm);
    for (int s : matrix[i]) {
      const double dw = s - row_means[i];
      within.add(dw * dw);
    }
  }
  const double msb = r * between.value() / (n - 1.0);
  const double msw = within.value() / (n * (r - 1.0));
  const double denom = msb + (r - 1.0) * msw;
  if (denom == 0.0) return std::nullopt;
  return (msb - msw) / denom;
}

SpreadSummary confidence_std_summary(std::span<const std::vector<double>> groups) {
  require_tuples(groups, "confidence_std_summary");
  std::vector<double> stds;
  stds.reserve(groups.size());
  for (const auto& g : groups) stds.push_back(stats::sample_stddev(g));
  return {stats::mean(stds), stats::percentile_nearest_rank(stds, 95.0)};
}

std::set<std::string> tokenize(std::string_view text) {
  std::set<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.insert(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(std::move(current));
  return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& t : a) shared += b.count(t);
  const std::size_t uni = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

double text_overlap(std::span<const std::vector<std::string>> groups) {
  require_tuples(groups, "text_overlap");
  std::vector<double> per_image;
  per_image.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<std::set<std::string>> sets;
    sets.reserve(g.size());
    for (const auto& text : g) sets.push_back(tokenize(text));
    CompensatedSum acc;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        acc.add(jaccard(sets[i], sets[j]));
        ++pairs;
      }
    }
    per_image.push_back(acc.value() / static_cast<double>(pairs));
  }
  return stats::mean(per_image);
}

MeanDeviations mean_deviations(std::span<const Residual> cell) {
  if (cell.empty()) throw Error(ErrorCode::EmptyCell, "no residuals in cell");
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_run;
  for (const auto& r : cell) {
    by_run[r.run_index].first.push_back(r.d_score);
    by_run[r.run_index].second.push_back(r.d_conf);
  }
  std::vector<double> score_means, conf_means;
  for (const auto& [run, values] : by_run) {
    score_means.push_back(stats::mean(values.first));
    conf_means.push_back(stats::mean(values.second));
  }
  return {stats::mean(score_means), stats::mean(conf_means)};
}

Dispersion dispersion_and_ci(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "confidence interval needs n >= 2");
  }
  Dispersion d;
  d.mean = stats::mean(values);
  d.std = stats::sample_stddev(values);
  const double n = static_cast<double>(values.size());
  const double half = stats::student_t_quantile(0.975, n - 1.0) * d.std / std::sqrt(n);
  d.ci_lo = d.mean - half;
  d.ci_hi = d.mean + half;
  return d;
}

MaybeStat cohens_dz(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::TooFewSamples, "dz needs n >= 2");
  const double sd = stats::sample_stddev(values);
  if (sd == 0.0) return std::nullopt;
  return stats::mean(values) / sd;
}

MaybeStat spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::MisalignedGroups, "spearman inputs differ in length");
  }
  const auto rx = stats::average_ranks(x);
  const auto ry = stats::average_ranks(y);
  return stats::pearson(rx, ry);
}

MaybeStat spearman_severity(const std::array<double, 3>& drops) {
  constexpr std::array<double, 3> severities = {1.0, 2.0, 3.0};
  return spearman(severities, drops);
}

JarqueBera jarque_bera(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::TooFewSamples, "Jarque-Bera needs n >= 2");
  const double n = static_cast<double>(values.size());
  const double m = stats::mean(values);
  CompensatedSum s2, s3, s4;
  for (double v : values) {
    const double d = v - m;
    s2.add(d * d);
    s3.add(d * d * d);
    s4.add(d * d * d * d);
  }
  const double m2 = s2.value() / n;
  if (m2 == 0.0) return {};
  const double skew = (s3.value() / n) / std::pow(m2, 1.5);
  const double kurt = (s4.value() / n) / (m2 * m2);
  const double jb = n / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
  return {jb, std::exp(-jb / 2.0)};
}

TTest paired_t_test(std::span<const double> residuals) {
  if (residuals.size() < 2) throw Error(ErrorCode::TooFewSamples, "t-test needs n >= 2");
  TTest out;
  out.df = static_cast<int>(residuals.size()) - 1;
  const double m = stats::mean(residuals);
  const double sd = stats::sample_stddev(residuals);
  if (sd == 0.0) {
    out.p_value = m == 0.0 ? 1.0 : 0.0;
    return out;
  }
  const double t = m / (sd / std::sqrt(static_cast<double>(residuals.size())));
  out.statistic = t;
  out.p_value = stats::student_t_two_sided_p(t, out.df);
  return out;
}

Wilcoxon wilcoxon_signed_rank(std::span<const double> residuals) {
  Wilcoxon out;
  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (double d : residuals) {
    if (d == 0.0) continue;
    magnitudes.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  out.n_nonzero = static_cast<int>(magnitudes.size());
  if (magnitudes.empty()) return out;

  const auto ranks = stats::average_ranks(magnitudes);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (positive[i]) out.w_plus += ranks[i];
  }

  const int n = out.n_nonzero;
  if (n <= kWilcoxonExactMaxN) {
    // Midranks are multiples of 1/2: count sign assignments over doubled
    // integer ranks.
    std::vector<int> doubled(ranks.size());
    int total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
    counts[0] = 1;
    int reach = 0;
    for (int r : doubled) {
      for (int s = reach; s >= 0; --s) counts[s + r] += counts[s];
      reach += r;
    }
    const int w2 = static_cast<int>(std::lround(2.0 * out.w_plus));
    std::uint64_t lower = 0, upper = 0;
    for (int s = 0; s <= total; ++s) {
      if (s <= w2) lower += counts[s];
      if (s >= w2) upper += counts[s];
    }
    const double all = std::ldexp(1.0, n);
    out.exact = true;
    out.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / all);
    return out;
  }

  const double nn = n;
  const double mu = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted = magnitudes;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(out.w_plus - mu) - 0.5) / std::sqrt(var);
  out.z = z;
  out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

PairedTestResult paired_test(std::span<const double> residuals) {
  if (residuals.size() < kPairedTestMinN) {
    throw Error(ErrorCode::TooFewSamples,
                "paired test needs n >= " + std::to_string(kPairedTestMinN));
  }
  PairedTestResult out;
  out.t_test = paired_t_test(residuals);
  out.wilcoxon = wilcoxon_signed_rank(residuals);
  out.normality = jarque_bera(residuals);

  const bool all_zero = std::all_of(residuals.begin(), residuals.end(),
                                    [](double d) { return d == 0.0; });
  if (all_zero) {
    out.test_name = "all-zero";
    out.statistic = 0.0;
    out.p_value = 1.0;
    return out;
  }
  const bool normal = out.normality.p_value && *out.normality.p_value >= kNormalityAlpha;
  if (normal && out.t_test.statistic) {
    out.test_name = "t-test";
    out.statistic = *out.t_test.statistic;
    out.p_value = out.t_test.p_value;
  } else {
    out.test_name = "wilcoxon";
    out.statistic = out.wilcoxon.w_plus;
    out.p_value = out.wilcoxon.p_value;
  }
  return out;
}

}  // namespace segjudge
