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

// Numerical building blocks shared by the repeatability and sensitivity
// metrics. Everything here is double precision; sums are compensated.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segjudge::stats {

/// A statistic that can be mathematically undefined (0/0, all ties, zero
/// variance). Rendered as an explicit sentinel, never as 0 or NaN.
using MaybeStat = std::optional<double>;

inline constexpr const char* kUndefined = "\xe2\x80\x94";  // U+2014

/// Neumaier-compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double sum(std::span<const double> xs) noexcept;
/// Throws EmptyInput.
double mean(std::span<const double> xs);
/// Two-pass, denominator n-1. Throws TooFewSamples when n < 2.
double sample_variance(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);

/// Nearest-rank percentile: the ceil(p/100 * n)-th order statistic.
/// Throws EmptyInput.
double percentile_nearest_rank(std::span<const double> xs, double p);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double normal_cdf(double z) noexcept;

double student_t_cdf(double t, double df);
/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);
/// Inverse CDF by bisection on student_t_cdf. Requires 0 < p < 1.
double student_t_quantile(double p, double df);

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

MaybeStat pearson(std::span<const double> x, std::span<const double> y);

/// Rounds half away from zero to `decimals` places and prints a fixed
/// decimal; undefined values print the sentinel.
std::string format_fixed(double value, int decimals);
std::string format_fixed(const MaybeStat& value, int decimals);
/// %.6g-style rendering for p-values and test statistics.
std::string format_general(const MaybeStat& value);

}  // namespace segjudge::stats
