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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segjudge/core_model.hpp"

namespace segjudge {

/// One corpus sample: an image (clean or corrupted) plus the mask the
/// segmenter predicted for it.
struct ManifestRow {
  std::string image_id;
  Condition condition = Condition::clean();
  /// Empty for a corrupted row whose image is still to be synthesized.
  std::filesystem::path image_path;
  std::filesystem::path mask_path;
  /// True when a corrupted row reuses the clean mask because no
  /// per-condition mask was supplied.
  bool mask_reuse = false;
};

inline constexpr std::string_view kManifestHeader =
    "image_id,family,severity,image_path,mask_path,mask_reuse";

class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::vector<ManifestRow> rows);

  const std::vector<ManifestRow>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }

  const ManifestRow* find(std::string_view image_id, const Condition& condition) const;

  /// Adds or replaces the row for (image_id, condition).
  void upsert(ManifestRow row);

  /// Throws DuplicateKey or MissingCleanReference.
  void validate() const;

  /// Sorted by (image_id, condition).
  void sort();

 private:
  std::vector<ManifestRow> rows_;
};

struct ManifestLoadOptions {
  /// Check that every non-empty path exists (MissingFile otherwise).
  bool check_files = true;
};

/// Relative paths resolve against the manifest's directory.
/// Throws ParseError (with line number), DuplicateKey,
/// MissingCleanReference, MissingFile.
Manifest load_manifest(const std::filesystem::path& path,
                       ManifestLoadOptions options = {});

/// Rows are written sorted, with paths relative to the manifest directory.
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace segjudge
