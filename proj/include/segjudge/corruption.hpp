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

// Seeded synthesis of weather and lighting corruptions.
//
// Every operator is a pure function of (image bytes, condition, seed). The
// random geometry of an operator (streaks, flakes, shadow polygons, flare
// position) is drawn from the seed in a fixed order with a fixed number of
// draws per primitive, so for a given seed a higher severity draws a
// superset of the primitives a lower severity draws. Together with the
// parameter tables below this makes the per-pixel deviation from the clean
// image non-decreasing in severity.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "segjudge/core_model.hpp"
#include "segjudge/raster.hpp"

namespace segjudge {

/// Family-specific knobs for one severity. Fields not used by a family keep
/// their neutral defaults.
struct SeverityParams {
  // fog: out = round(I*t + A*(1-t))
  double fog_transmission = 1.0;
  std::uint8_t fog_airlight = 240;
  // rain: streaks per 10^4 pixels
  double rain_density = 0.0;
  // snow: luminance threshold for whitening, flakes per 10^4 pixels
  double snow_threshold = 256.0;
  double snow_flake_density = 0.0;
  // shadow: polygon count and luminance scale inside them
  int shadow_count = 0;
  double shadow_factor = 1.0;
  // sunflare: peak additive glow
  double flare_gain = 0.0;
};

/// Throws InvalidSpec for the clean condition.
SeverityParams severity_params(const Condition& condition);

// Fixed operator constants.
inline constexpr double kRainSlantDegrees = -10.0;
inline constexpr int kRainStreakLength = 20;
inline constexpr double kRainAlpha = 0.5;
inline constexpr std::array<std::uint8_t, 3> kRainColor = {200, 200, 220};
inline constexpr double kSnowWhitening = 0.6;
inline constexpr int kSnowFlakeRadius = 2;
inline constexpr double kSnowFlakeAlpha = 0.7;
inline constexpr double kShadowMinArea = 0.05;
inline constexpr double kShadowMaxArea = 0.15;
inline constexpr double kFlareSigmaFraction = 0.15;
inline constexpr int kFlareCircles = 3;

class CorruptionSpec {
 public:
  /// Throws InvalidSpec when `condition` is clean; clean is the identity
  /// and never reaches the operators.
  CorruptionSpec(Condition condition, std::uint64_t seed);

  const Condition& condition() const noexcept { return condition_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  Condition condition_;
  std::uint64_t seed_;
};

/// FNV-1a 64 over "master_seed|image_id|family|severity".
std::uint64_t derive_corruption_seed(std::uint64_t master_seed,
                                     std::string_view image_id,
                                     const Condition& condition);

/// Throws EmptyImage for a zero-sized raster.
RgbImage apply_corruption(const RgbImage& image, const CorruptionSpec& spec);

/// Mean absolute byte deviation from `image` at severities 1, 2 and 3,
/// all generated from the same seed.
std::array<double, 3> severity_monotonicity_probe(const RgbImage& image,
                                                  Family family,
                                                  std::uint64_t seed = 0);

/// Mean |a - b| over all bytes. Throws DimensionMismatch.
double mean_absolute_delta(const RgbImage& a, const RgbImage& b);

}  // namespace segjudge
