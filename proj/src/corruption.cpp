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

#include "segjudge/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "segjudge/rng.hpp"

namespace segjudge {

namespace {

// Half-away-from-zero rounding, saturated to a byte.
std::uint8_t to_byte(double v) {
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

std::uint8_t blend_toward(std::uint8_t value, double target, double alpha) {
  return to_byte((1.0 - alpha) * value + alpha * target);
}

int streak_count(double per_10k, const RgbImage& image) {
  return static_cast<int>(
      std::round(per_10k * static_cast<double>(image.pixel_count()) / 1e4));
}

void apply_fog(RgbImage& image, const SeverityParams& p) {
  const double t = p.fog_transmission;
  const double airlight = p.fog_airlight;
  for (auto& v : image.bytes()) v = to_byte(v * t + airlight * (1.0 - t));
}

void apply_rain(RgbImage& image, const SeverityParams& p, SplitMix64& rng) {
  const int w = image.width(), h = image.height();
  const double slant = kRainSlantDegrees * std::numbers::pi / 180.0;
  const double dx = kRainStreakLength * std::sin(slant);
  const double dy = kRainStreakLength * std::cos(slant);
  const int n = streak_count(p.rain_density, image);
  for (int i = 0; i < n; ++i) {
    // Starts may lie above the frame so streaks can enter from the top.
    const double x0 = rng.uniform(0.0, static_cast<double>(w));
    const double y0 = rng.uniform(-dy, static_cast<double>(h));
    int last_x = -1, last_y = -1;
    for (int s = 0; s <= kRainStreakLength; ++s) {
      const double f = static_cast<double>(s) / kRainStreakLength;
      const int px = static_cast<int>(std::floor(x0 + dx * f));
      const int py = static_cast<int>(std::floor(y0 + dy * f));
      if (px == last_x && py == last_y) continue;
      last_x = px;
      last_y = py;
      if (px < 0 || py < 0 || px >= w || py >= h) continue;
      std::uint8_t* rgb = image.pixel(px, py);
      for (int c = 0; c < 3; ++c) rgb[c] = blend_toward(rgb[c], kRainColor[c], kRainAlpha);
    }
  }
}

void apply_snow(RgbImage& image, const SeverityParams& p, SplitMix64& rng) {
  const int w = image.width(), h = image.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t* rgb = image.pixel(x, y);
      const double lum = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
      if (lum > p.snow_threshold) {
        for (int c = 0; c < 3; ++c) rgb[c] = blend_toward(rgb[c], 255.0, kSnowWhitening);
      }
    }
  }
  const int n = streak_count(p.snow_flake_density, image);
  const int r = kSnowFlakeRadius;
  for (int i = 0; i < n; ++i) {
    const int cx = static_cast<int>(std::floor(rng.uniform(0.0, static_cast<double>(w))));
    const int cy = static_cast<int>(std::floor(rng.uniform(0.0, static_cast<double>(h))));
    for (int oy = -r; oy <= r; ++oy) {
      for (int ox = -r; ox <= r; ++ox) {
        if (ox * ox + oy * oy > r * r) continue;
        const int px = cx + ox, py = cy + oy;
        if (px < 0 || py < 0 || px >= w || py >= h) continue;
        std::uint8_t* rgb = image.pixel(px, py);
        for (int c = 0; c < 3; ++c) rgb[c] = blend_toward(rgb[c], 255.0, kSnowFlakeAlpha);
      }
    }
  }
}

struct Point {
  double x;
  double y;
};

using Quad = std::array<Point, 4>;

double polygon_area(const Quad& q) {
  double twice = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Point& a = q[i];
    const Point& b = q[(i + 1) % q.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

// Vertices sit on an ellipse in angular order, hence the quad is convex.
// Consumes exactly nine draws.
Quad sample_shadow_quad(SplitMix64& rng, int w, int h) {
  const double base = rng.uniform(0.0, std::numbers::pi / 2.0);
  std::array<double, 4> jitter{};
  for (auto& j : jitter) j = rng.uniform(-std::numbers::pi / 8.0, std::numbers::pi / 8.0);
  const double aspect = std::sqrt(rng.uniform(0.5, 2.0));
  const double area_fraction = rng.uniform(kShadowMinArea, kShadowMaxArea);
  const double u = rng.uniform();
  const double v = rng.uniform();

  Quad q{};
  for (int i = 0; i < 4; ++i) {
    const double phi = base + i * std::numbers::pi / 2.0 + jitter[i];
    q[i] = {std::cos(phi) * aspect, std::sin(phi) / aspect};
  }
  const double scale = std::sqrt(area_fraction * w * h / polygon_area(q));
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (auto& pt : q) {
    pt.x *= scale;
    pt.y *= scale;
    min_x = std::min(min_x, pt.x);
    max_x = std::max(max_x, pt.x);
    min_y = std::min(min_y, pt.y);
    max_y = std::max(max_y, pt.y);
  }
  // Keep the polygon inside the frame when it fits.
  const double lo_x = -min_x, hi_x = w - max_x;
  const double lo_y = -min_y, hi_y = h - max_y;
  const double cx = hi_x >= lo_x ? lo_x + u * (hi_x - lo_x) : w / 2.0;
  const double cy = hi_y >= lo_y ? lo_y + v * (hi_y - lo_y) : h / 2.0;
  for (auto& pt : q) {
    pt.x += cx;
    pt.y += cy;
  }
  return q;
}

bool inside_convex(const Quad& q, double x, double y) {
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Point& a = q[i];
    const Point& b = q[(i + 1) % q.size()];
    const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (cross > 0) pos = true;
    if (cross < 0) neg = true;
    if (pos && neg) return false;
  }
  return true;
}

void apply_shadow(RgbImage& image, const SeverityParams& p, SplitMix64& rng) {
  const int w = image.width(), h = image.height();
  std::vector<Quad> quads;
  for (int k = 0; k < p.shadow_count; ++k) quads.push_back(sample_shadow_quad(rng, w, h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const bool shaded = std::any_of(quads.begin(), quads.end(), [&](const Quad& q) {
        return inside_convex(q, px, py);
      });
      if (!shaded) continue;
      std::uint8_t* rgb = image.pixel(x, y);
      for (int c = 0; c < 3; ++c) rgb[c] = to_byte(rgb[c] * p.shadow_factor);
    }
  }
}

void apply_sunflare(RgbImage& image, const SeverityParams& p, SplitMix64& rng) {
  const int w = image.width(), h = image.height();
  const double fx = rng.uniform(0.0, static_cast<double>(w));
  const double fy = rng.uniform(0.0, h / 3.0);
  const double min_dim = std::min(w, h);
  const double sigma = kFlareSigmaFraction * min_dim;

  struct Circle {
    double x, y, r;
  };
  std::array<Circle, kFlareCircles> circles{};
  const double ax = w / 2.0 - fx, ay = h / 2.0 - fy;
  for (auto& c : circles) {
    const double along = rng.uniform(0.3, 1.6);
    const double radius = rng.uniform(0.03, 0.08) * min_dim;
    c = {fx + along * ax, fy + along * ay, radius};
  }
  const double circle_gain = 0.3 * p.flare_gain;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double d2 = (px - fx) * (px - fx) + (py - fy) * (py - fy);
      double add = p.flare_gain * std::exp(-d2 / (2.0 * sigma * sigma));
      for (const auto& c : circles) {
        const double cd2 = (px - c.x) * (px - c.x) + (py - c.y) * (py - c.y);
        if (cd2 <= c.r * c.r) add += circle_gain;
      }
      std::uint8_t* rgb = image.pixel(x, y);
      for (int ch = 0; ch < 3; ++ch) rgb[ch] = to_byte(rgb[ch] + add);
    }
  }
}

}  // namespace

SeverityParams severity_params(const Condition& condition) {
  if (condition.is_clean()) {
    throw Error(ErrorCode::InvalidSpec, "clean has no corruption parameters");
  }
  const int k = condition.severity() - 1;
  SeverityParams p;
  switch (condition.family()) {
    case Family::Fog:
      p.fog_transmission = std::array{0.7, 0.5, 0.3}[k];
      break;
    case Family::Rain:
      p.rain_density = std::array{2.0, 4.0, 8.0}[k];
      break;
    case Family::Snow:
      p.snow_threshold = std::array{180.0, 150.0, 120.0}[k];
      p.snow_flake_density = std::array{1.0, 2.0, 4.0}[k];
      break;
    case Family::Shadow:
      p.shadow_count = std::array{1, 2, 3}[k];
      p.shadow_factor = std::array{0.6, 0.5, 0.4}[k];
      break;
    case Family::Sunflare:
      p.flare_gain = std::array{80.0, 120.0, 160.0}[k];
      break;
    case Family::Clean:
      break;
  }
  return p;
}

CorruptionSpec::CorruptionSpec(Condition condition, std::uint64_t seed)
    : condition_(condition), seed_(seed) {
  if (condition.is_clean()) {
    throw Error(ErrorCode::InvalidSpec, "clean is not a corruption");
  }
}

std::uint64_t derive_corruption_seed(std::uint64_t master_seed,
                                     std::string_view image_id,
                                     const Condition& condition) {
  std::string key = std::to_string(master_seed);
  key += '|';
  key += image_id;
  key += '|';
  key += family_name(condition.family());
  key += '|';
  key += std::to_string(condition.severity());
  return fnv1a64(key);
}

RgbImage apply_corruption(const RgbImage& image, const CorruptionSpec& spec) {
  if (image.empty()) throw Error(ErrorCode::EmptyImage, "cannot corrupt an empty raster");
  const SeverityParams params = severity_params(spec.condition());
  SplitMix64 rng(spec.seed());
  RgbImage out = image;
  switch (spec.condition().family()) {
    case Family::Fog: apply_fog(out, params); break;
    case Family::Rain: apply_rain(out, params, rng); break;
    case Family::Snow: apply_snow(out, params, rng); break;
    case Family::Shadow: apply_shadow(out, params, rng); break;
    case Family::Sunflare: apply_sunflare(out, params, rng); break;
    case Family::Clean: break;
  }
  return out;
}

double mean_absolute_delta(const RgbImage& a, const RgbImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "rasters differ in size");
  }
  if (a.empty()) return 0.0;
  const auto x = a.bytes();
  const auto y = b.bytes();
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += static_cast<std::uint64_t>(std::abs(int{x[i]} - int{y[i]}));
  }
  return static_cast<double>(total) / static_cast<double>(x.size());
}

std::array<double, 3> severity_monotonicity_probe(const RgbImage& image,
                                                  Family family,
                                                  std::uint64_t seed) {
  std::array<double, 3> deltas{};
  for (int k = 1; k <= kMaxSeverity; ++k) {
    const CorruptionSpec spec(Condition(family, k), seed);
    deltas[k - 1] = mean_absolute_delta(image, apply_corruption(image, spec));
  }
  return deltas;
}

}  // namespace segjudge
