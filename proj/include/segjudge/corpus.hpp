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

// Batch operations over a manifest: synthesizing the corrupted challenge
// set and rendering overlays.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "segjudge/campaign.hpp"
#include "segjudge/manifest.hpp"
#include "segjudge/overlay.hpp"

namespace segjudge {

struct FileFailure {
  std::filesystem::path path;
  ErrorCode code = ErrorCode::IoFailure;
  std::string message;
};

struct CorruptOptions {
  std::uint64_t master_seed = 0;
  std::vector<Family> families{kCorruptionFamilies.begin(), kCorruptionFamilies.end()};
  std::vector<int> severities{1, 2, 3};
  /// Images land in <out_dir>/corrupted/<family>-<severity>/<image_id>.png.
  std::filesystem::path out_dir;
  int max_parallel = 1;
};

struct CorruptResult {
  /// Input rows plus one row per produced (image, family, severity).
  Manifest manifest;
  std::size_t written = 0;
  /// Outputs whose bytes already matched and were left untouched.
  std::size_t unchanged = 0;
  std::vector<FileFailure> failures;
};

/// Corrupted rows keep a per-condition mask if the input manifest supplies
/// one and otherwise reuse the clean mask with mask_reuse set. Failures are
/// collected per file; no partial output survives a failed write.
CorruptResult corrupt_corpus(const Manifest& manifest, const CorruptOptions& options);

struct OverlayOptions {
  OverlayStyle style;
  /// Overlays land in <out_dir>/overlays/<condition>/<image_id>.png.
  std::filesystem::path out_dir;
  int max_parallel = 1;
};

struct OverlayResult {
  std::vector<CampaignSample> samples;
  std::size_t written = 0;
  std::size_t unchanged = 0;
  std::vector<FileFailure> failures;
};

std::filesystem::path overlay_path_for(const std::filesystem::path& out_dir,
                                       const ManifestRow& row);

/// One overlay per manifest row that has an image. Throws EmptyInput for
/// an empty manifest; per-row problems (DimensionMismatch, NonBinaryMask,
/// I/O) are collected.
OverlayResult build_overlays(const Manifest& manifest, const OverlayOptions& options);

/// Campaign samples for rows with an image and a mask, pointing at their
/// overlay paths. Statistics are filled in when `with_stats` is set.
std::vector<CampaignSample> campaign_samples(const Manifest& manifest,
                                             const std::filesystem::path& out_dir,
                                             bool with_stats);

/// Writes `bytes` unless the file already holds exactly them. Returns
/// whether a write happened.
bool write_if_changed(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace segjudge
