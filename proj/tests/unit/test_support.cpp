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


#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "segjudge/error.hpp"
#include "segjudge/rng.hpp"

namespace segjudge::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "segjudge-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw Error(ErrorCode::IoFailure, "mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

RgbImage make_scene(int width, int height, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    const double v = static_cast<double>(y) / std::max(height - 1, 1);
    for (int x = 0; x < width; ++x) {
      auto* p = img.pixel(x, y);
      const int noise = static_cast<int>(rng.next() % 21) - 10;
      p[0] = static_cast<std::uint8_t>(std::clamp(static_cast<int>(150 - 90 * v) + noise, 0, 255));
      p[1] = static_cast<std::uint8_t>(std::clamp(static_cast<int>(170 - 60 * v) + noise, 0, 255));
      p[2] = static_cast<std::uint8_t>(std::clamp(static_cast<int>(220 - 150 * v) + noise, 0, 255));
    }
  }
  // A bright rooftop and a dark tree line.
  const int bx = static_cast<int>(rng.next() % static_cast<std::uint64_t>(std::max(width / 2, 1)));
  const int by = height / 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(std::max(height / 4, 1)));
  for (int y = by; y < std::min(height, by + height / 5); ++y) {
    for (int x = bx; x < std::min(width, bx + width / 4); ++x) {
      auto* p = img.pixel(x, y);
      p[0] = p[1] = p[2] = 235;
    }
  }
  for (int y = height - height / 6; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      auto* p = img.pixel(x, y);
      p[0] = 30;
      p[1] = 60;
      p[2] = 25;
    }
  }
  return img;
}

GrayImage make_line_mask(int width, int height, std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0x5eedULL);
  GrayImage mask(width, height);
  const int lines = 2 + static_cast<int>(rng.next() % 2);
  for (int l = 0; l < lines; ++l) {
    const double y0 = rng.uniform(0.1, 0.6) * height;
    const double slope = rng.uniform(-0.2, 0.2);
    for (int x = 0; x < width; ++x) {
      const int y = static_cast<int>(std::lround(y0 + slope * x));
      if (y >= 0 && y < height) mask.at(x, y) = 255;
    }
  }
  return mask;
}

SyntheticCorpus write_clean_corpus(const fs::path& dir, int n, int width, int height) {
  SyntheticCorpus corpus;
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  std::vector<ManifestRow> rows;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img%04d", i);
    const fs::path img = dir / "images" / (std::string(id) + ".png");
    const fs::path mask = dir / "masks" / (std::string(id) + ".png");
    write_png(img, make_scene(width, height, 1000 + static_cast<std::uint64_t>(i)));
    write_png(mask, make_line_mask(width, height, 1000 + static_cast<std::uint64_t>(i)));
    rows.push_back({id, Condition::clean(), img, mask, false});
  }
  corpus.manifest = Manifest(std::move(rows));
  corpus.manifest_path = dir / "manifest.csv";
  save_manifest(corpus.manifest_path, corpus.manifest);
  return corpus;
}

std::vector<CampaignSample> stat_samples(int n, const std::vector<Condition>& conditions,
                                         double coverage) {
  std::vector<CampaignSample> out;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img%04d", i);
    for (const auto& c : conditions) {
      out.push_back({id, c, {}, {}, OverlayStats{coverage, 2}});
    }
  }
  return out;
}

std::vector<Condition> all_conditions() {
  std::vector<Condition> out{Condition::clean()};
  for (Family f : kCorruptionFamilies) {
    for (int s = 1; s <= kMaxSeverity; ++s) out.emplace_back(f, s);
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace segjudge::testing
