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

#include "segjudge/overlay.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "segjudge/error.hpp"

namespace segjudge {

OverlayStyle::OverlayStyle(std::array<std::uint8_t, 3> color, double alpha)
    : color_(color), alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidSpec,
                "overlay alpha " + std::to_string(alpha) + " not in [0,1]");
  }
}

void require_binary_mask(const GrayImage& mask) {
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    const auto v = mask.bytes()[i];
    if (v != 0 && v != 255) {
      throw Error(ErrorCode::NonBinaryMask,
                  "mask value " + std::to_string(v) + " at pixel " + std::to_string(i));
    }
  }
}

RgbImage compose_overlay(const RgbImage& image, const GrayImage& mask,
                         const OverlayStyle& style) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                "image " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + " vs mask " +
                    std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
  }
  require_binary_mask(mask);
  RgbImage out = image;
  const double a = style.alpha();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask.at(x, y) == 0) continue;
      std::uint8_t* rgb = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        rgb[c] = static_cast<std::uint8_t>(
            std::round((1.0 - a) * rgb[c] + a * style.color()[c]));
      }
    }
  }
  return out;
}

OverlayStats overlay_stats(const GrayImage& mask) {
  require_binary_mask(mask);
  OverlayStats stats;
  if (mask.empty()) return stats;

  const int w = mask.width(), h = mask.height();
  std::vector<std::uint8_t> seen(mask.pixel_count(), 0);
  std::vector<std::pair<int, int>> stack;
  std::size_t positive = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) == 0) continue;
      ++positive;
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (seen[idx]) continue;
      ++stats.component_count;
      seen[idx] = 1;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (seen[n] || mask.at(nx, ny) == 0) continue;
            seen[n] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  stats.coverage_fraction =
      static_cast<double>(positive) / static_cast<double>(mask.pixel_count());
  return stats;
}

}  // namespace segjudge
