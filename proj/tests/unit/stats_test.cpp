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


#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>

#include "segjudge/error.hpp"
#include "segjudge/stats.hpp"

namespace segjudge::stats {
namespace {

TEST(SummationTest, CompensatedSumKeepsSmallTerms) {
  std::vector<double> xs = {1e16, 1.0, -1e16, 1.0};
  EXPECT_DOUBLE_EQ(sum(xs), 2.0);
}

TEST(MomentsTest, MeanAndVariance) {
  const std::vector<double> xs = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(xs), 2.5);
  EXPECT_DOUBLE_EQ(sample_variance(xs), 5.0 / 3.0);
  EXPECT_THROW(mean(std::vector<double>{}), Error);
  EXPECT_THROW(sample_variance(std::vector<double>{1.0}), Error);
}

TEST(MomentsTest, VarianceIsShiftInvariant) {
  const std::vector<double> xs = {1e9 + 1, 1e9 + 2, 1e9 + 3};
  EXPECT_NEAR(sample_variance(xs), 1.0, 1e-9);
}

TEST(PercentileTest, MatchesSortOracle) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 150;
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(gen);
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {1.0, 50.0, 95.0, 100.0}) {
      const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
      EXPECT_EQ(percentile_nearest_rank(xs, p), sorted[std::max<std::size_t>(rank, 1) - 1]);
    }
  }
}

TEST(PercentileTest, HundredValuesGiveNinetyFifth) {
  std::vector<double> xs;
  for (int i = 100; i >= 1; --i) xs.push_back(i);
  EXPECT_EQ(percentile_nearest_rank(xs, 95.0), 95.0);
}

TEST(IncompleteBetaTest, MatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 15.0}) {
    for (double b : {0.5, 1.0, 3.0, 40.0}) {
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        const double ref = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(incomplete_beta(a, b, x), ref, 1e-12) << a << " " << b << " " << x;
      }
    }
  }
}

TEST(StudentTTest, TableQuantiles) {
  EXPECT_NEAR(student_t_quantile(0.975, 2), 4.3027, 1e-4);
  EXPECT_NEAR(student_t_quantile(0.975, 5), 2.5706, 1e-4);
  EXPECT_NEAR(student_t_quantile(0.975, 10), 2.2281, 1e-4);
  EXPECT_NEAR(student_t_quantile(0.975, 30), 2.0423, 1e-4);
}

TEST(StudentTTest, MatchesBoostDistribution) {
  for (double df : {1.0, 2.0, 3.0, 7.0, 29.0, 120.0, 999.0}) {
    const boost::math::students_t dist(df);
    for (double t : {-6.0, -2.0, -0.3, 0.0, 0.8, 2.5, 9.0}) {
      EXPECT_NEAR(student_t_cdf(t, df), boost::math::cdf(dist, t), 1e-12);
      EXPECT_NEAR(student_t_two_sided_p(t, df), 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 1e-12);
    }
    for (double p : {0.6, 0.9, 0.975, 0.995}) {
      EXPECT_NEAR(student_t_quantile(p, df), boost::math::quantile(dist, p), 1e-9);
    }
  }
}

TEST(NormalTest, MatchesBoost) {
  const boost::math::normal dist;
  for (double z : {-4.0, -1.96, 0.0, 0.5, 3.0}) {
    EXPECT_NEAR(normal_cdf(z), boost::math::cdf(dist, z), 1e-14);
  }
}

TEST(RanksTest, TiesShareMeanRank) {
  const std::vector<double> xs = {10, 20, 20, 5};
  const auto r = average_ranks(xs);
  EXPECT_EQ(r, (std::vector<double>{2.0, 3.5, 3.5, 1.0}));
}

TEST(PearsonTest, ZeroVarianceIsUndefined) {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {4, 4, 4};
  EXPECT_FALSE(pearson(x, y).has_value());
  EXPECT_NEAR(*pearson(x, std::vector<double>{2, 4, 6}), 1.0, 1e-15);
}

TEST(FormatTest, HalfAwayFromZeroAndSentinel) {
  EXPECT_EQ(format_fixed(2.5, 0), "3");
  EXPECT_EQ(format_fixed(-2.5, 0), "-3");
  EXPECT_EQ(format_fixed(0.12345, 3), "0.123");
  EXPECT_EQ(format_fixed(-0.0001, 3), "0.000");
  EXPECT_EQ(format_fixed(MaybeStat{}, 3), "\xe2\x80\x94");
  EXPECT_EQ(format_general(MaybeStat{}), "\xe2\x80\x94");
}

}  // namespace
}  // namespace segjudge::stats
