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

#pragma once

#include <array>
#include <cstdint>

#include "segjudge/raster.hpp"

namespace segjudge {

/// Solid-fill mask rendering. Default is half-transparent red.
class OverlayStyle {
 public:
  OverlayStyle() = default;
  /// Throws InvalidSpec unless alpha is in [0,1].
  OverlayStyle(std::array<std::uint8_t, 3> color, double alpha);

  const std::array<std::uint8_t, 3>& color() const noexcept { return color_; }
  double alpha() const noexcept { return alpha_; }

 private:
  std::array<std::uint8_t, 3> color_{255, 0, 0};
  double alpha_ = 0.5;
};

struct OverlayStats {
  double coverage_fraction = 0.0;
  int component_count = 0;
};

/// Throws NonBinaryMask on any value other than 0 and 255.
void require_binary_mask(const GrayImage& mask);

/// Masked pixels become round((1-a)*I + a*C) per channel; the rest are
/// copied unchanged. Throws DimensionMismatch, NonBinaryMask.
RgbImage compose_overlay(const RgbImage& image, const GrayImage& mask,
                         const OverlayStyle& style);

/// Foreground fraction and number of 8-connected foreground components.
OverlayStats overlay_stats(const GrayImage& mask);

}  // namespace segjudge
