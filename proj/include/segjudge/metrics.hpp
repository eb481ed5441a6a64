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

// Repeatability and sensitivity statistics for a judge.
//
// Repeatability metrics take one tuple of R values per image (all runs of
// one image under one condition). Sensitivity statistics take clean-minus-
// corrupted residuals for one (family, severity) cell.

#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segjudge/error.hpp"
#include "segjudge/stats.hpp"

namespace segjudge {

using stats::MaybeStat;

struct Tolerance {
  /// Maximum run-to-run confidence spread still counted as agreement.
  double epsilon = 1e-6;
};

// --- repeatability ---------------------------------------------------------

using ScoreTuples = std::vector<std::vector<int>>;
using ConfidenceTuples = std::vector<std::vector<double>>;
using TextTuples = std::vector<std::vector<std::string>>;

/// Fraction of images whose scores are identical across all runs.
double score_agreement(std::span<const std::vector<int>> groups);
/// Fraction of images with max - min confidence <= epsilon.
double confidence_agreement(std::span<const std::vector<double>> groups,
                            const Tolerance& tol);
/// Fraction of images satisfying both agreement conditions at once.
double combined_stability(std::span<const std::vector<int>> scores,
                          std::span<const std::vector<double>> confidences,
                          const Tolerance& tol);

/// One-way random-effects ICC(1,1) from ANOVA mean squares:
///   (MSB - MSW) / (MSB + (R-1) MSW).
/// Needs N >= 2 rows of equal length R >= 2. Returns nullopt when every
/// cell holds the same value (0/0).
MaybeStat icc_1_1(std::span<const std::vector<int>> matrix);

struct SpreadSummary {
  double mean = 0.0;
  double p95 = 0.0;
};
/// Per-image sample std of confidences, summarised by mean and
/// nearest-rank 95th percentile.
SpreadSummary confidence_std_summary(std::span<const std::vector<double>> groups);

/// Lowercased ASCII alphanumeric runs; everything else separates tokens.
std::set<std::string> tokenize(std::string_view text);
/// |A n B| / |A u B|; two empty sets count as identical.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);
/// Mean over images of the mean pairwise Jaccard overlap between runs.
double text_overlap(std::span<const std::vector<std::string>> groups);

// --- sensitivity ----------------------------------------------------------

struct Residual {
  std::string image_id;
  int run_index = 0;
  double d_score = 0.0;
  double d_conf = 0.0;
};

struct MeanDeviations {
  double score = 0.0;
  double confidence = 0.0;
};
/// Mean residual per run index, then averaged over runs. Throws EmptyCell.
MeanDeviations mean_deviations(std::span<const Residual> cell);

struct Dispersion {
  double mean = 0.0;
  double std = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};
/// Sample std and two-sided 95% Student-t interval for the mean.
/// Throws TooFewSamples when n < 2.
Dispersion dispersion_and_ci(std::span<const double> values);

/// mean / std (n-1). nullopt on zero variance. Throws TooFewSamples.
MaybeStat cohens_dz(std::span<const double> values);

/// Spearman rho with average ranks for ties. nullopt when either side is
/// constant.
MaybeStat spearman(std::span<const double> x, std::span<const double> y);
/// rho between severity levels (1,2,3) and the matching mean score drops.
MaybeStat spearman_severity(const std::array<double, 3>& drops);

struct JarqueBera {
  MaybeStat statistic;  // undefined on zero variance
  MaybeStat p_value;    // exp(-JB/2), the chi-square(2) upper tail
};
JarqueBera jarque_bera(std::span<const double> values);

struct TTest {
  MaybeStat statistic;
  double p_value = 1.0;
  int df = 0;
};
/// Two-sided one-sample t-test of mean zero.
TTest paired_t_test(std::span<const double> residuals);

struct Wilcoxon {
  double w_plus = 0.0;   // sum of ranks of positive residuals
  int n_nonzero = 0;     // zeros are discarded
  bool exact = false;
  MaybeStat z;           // normal approximation only
  double p_value = 1.0;
};
inline constexpr int kWilcoxonExactMaxN = 12;
/// Two-sided signed-rank test. Exact null distribution (midranks for ties)
/// up to kWilcoxonExactMaxN nonzero residuals, otherwise the normal
/// approximation with continuity and tie corrections.
Wilcoxon wilcoxon_signed_rank(std::span<const double> residuals);

inline constexpr double kNormalityAlpha = 0.05;
inline constexpr std::size_t kPairedTestMinN = 6;

struct PairedTestResult {
  std::string test_name;  // "t-test", "wilcoxon" or "all-zero"
  double statistic = 0.0;
  double p_value = 1.0;
  JarqueBera normality;
  TTest t_test;
  Wilcoxon wilcoxon;
};
/// Jarque-Bera screen then t-test (normality kept) or Wilcoxon (rejected).
/// Both tests are always computed. Throws TooFewSamples when n < 6.
PairedTestResult paired_test(std::span<const double> residuals);

}  // namespace segjudge
