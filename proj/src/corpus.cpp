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

#include "segjudge/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <thread>

#include "segjudge/corruption.hpp"
#include "segjudge/raster.hpp"

namespace segjudge {

namespace fs = std::filesystem;

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

bool same_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec) || fs::file_size(path, ec) != bytes.size()) return false;
  std::ifstream in(path, std::ios::binary);
  std::vector<char> buf(bytes.size());
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  return in && std::equal(buf.begin(), buf.end(), bytes.begin(),
                          [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; });
}

struct CorruptOutcome {
  std::vector<ManifestRow> rows;
  std::size_t written = 0;
  std::size_t unchanged = 0;
  std::vector<FileFailure> failures;
};

}  // namespace

bool write_if_changed(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  if (same_bytes(path, bytes)) return false;
  write_file_atomic(path, bytes);
  return true;
}

CorruptResult corrupt_corpus(const Manifest& manifest, const CorruptOptions& options) {
  for (Family f : options.families) {
    if (f == Family::Clean) throw Error(ErrorCode::UnknownFamily, "clean is not a corruption");
  }
  for (int s : options.severities) {
    if (s < 1 || s > kMaxSeverity) {
      throw Error(ErrorCode::SeverityOutOfRange, "severity " + std::to_string(s));
    }
  }
  manifest.validate();

  std::vector<const ManifestRow*> clean_rows;
  for (const auto& row : manifest.rows()) {
    if (row.condition.is_clean()) clean_rows.push_back(&row);
  }
  if (clean_rows.empty()) throw Error(ErrorCode::EmptyInput, "manifest has no clean rows");

  using Key = std::pair<std::string, Condition>;
  std::map<Key, const ManifestRow*> index;
  for (const auto& row : manifest.rows()) index[{row.image_id, row.condition}] = &row;

  std::vector<CorruptOutcome> outcomes(clean_rows.size());
  parallel_for(clean_rows.size(), options.max_parallel, [&](std::size_t i) {
    const ManifestRow& clean = *clean_rows[i];
    CorruptOutcome& out = outcomes[i];
    RgbImage image;
    try {
      image = read_rgb_png(clean.image_path);
    } catch (const Error& e) {
      out.failures.push_back({clean.image_path, e.code(), e.message()});
      return;
    }
    for (Family family : options.families) {
      for (int severity : options.severities) {
        const Condition cond(family, severity);
        const fs::path path = options.out_dir / "corrupted" / encode_condition(cond) /
                              (clean.image_id + ".png");
        try {
          const CorruptionSpec spec(cond, derive_corruption_seed(options.master_seed,
                                                                 clean.image_id, cond));
          const auto bytes = encode_png(apply_corruption(image, spec));
          (write_if_changed(path, bytes) ? out.written : out.unchanged) += 1;
        } catch (const Error& e) {
          out.failures.push_back({path, e.code(), e.message()});
          continue;
        }
        ManifestRow row{clean.image_id, cond, path, clean.mask_path, true};
        if (const auto it = index.find({clean.image_id, cond});
            it != index.end() && !it->second->mask_path.empty() && !it->second->mask_reuse) {
          row.mask_path = it->second->mask_path;
          row.mask_reuse = false;
        }
        out.rows.push_back(std::move(row));
      }
    }
  });

  std::map<Key, ManifestRow> merged;
  for (const auto& row : manifest.rows()) merged.emplace(Key{row.image_id, row.condition}, row);
  CorruptResult result;
  for (auto& out : outcomes) {
    for (auto& row : out.rows) {
      Key key{row.image_id, row.condition};
      merged.insert_or_assign(std::move(key), std::move(row));
    }
    result.written += out.written;
    result.unchanged += out.unchanged;
    for (auto& f : out.failures) result.failures.push_back(std::move(f));
  }
  std::vector<ManifestRow> rows;
  rows.reserve(merged.size());
  for (auto& [key, row] : merged) rows.push_back(std::move(row));
  result.manifest = Manifest(std::move(rows));
  return result;
}

fs::path overlay_path_for(const fs::path& out_dir, const ManifestRow& row) {
  return out_dir / "overlays" / encode_condition(row.condition) / (row.image_id + ".png");
}

OverlayResult build_overlays(const Manifest& manifest, const OverlayOptions& options) {
  if (manifest.empty()) throw Error(ErrorCode::EmptyInput, "empty manifest");

  std::vector<const ManifestRow*> rows;
  for (const auto& row : manifest.rows()) {
    if (!row.image_path.empty() && !row.mask_path.empty()) rows.push_back(&row);
  }

  struct Slot {
    std::optional<CampaignSample> sample;
    bool written = false;
    std::optional<FileFailure> failure;
  };
  std::vector<Slot> slots(rows.size());
  parallel_for(rows.size(), options.max_parallel, [&](std::size_t i) {
    const ManifestRow& row = *rows[i];
    const fs::path out = overlay_path_for(options.out_dir, row);
    fs::path current = row.image_path;
    try {
      const RgbImage image = read_rgb_png(row.image_path);
      current = row.mask_path;
      const GrayImage mask = read_gray_png(row.mask_path);
      current = out;
      const RgbImage overlay = compose_overlay(image, mask, options.style);
      slots[i].written = write_if_changed(out, encode_png(overlay));
      slots[i].sample =
          CampaignSample{row.image_id, row.condition, out, row.mask_path, overlay_stats(mask)};
    } catch (const Error& e) {
      slots[i].failure = FileFailure{current, e.code(), e.message()};
    }
  });

  OverlayResult result;
  for (auto& slot : slots) {
    if (slot.failure) {
      result.failures.push_back(std::move(*slot.failure));
      continue;
    }
    (slot.written ? result.written : result.unchanged) += 1;
    result.samples.push_back(std::move(*slot.sample));
  }
  return result;
}

std::vector<CampaignSample> campaign_samples(const Manifest& manifest, const fs::path& out_dir,
                                             bool with_stats) {
  std::vector<CampaignSample> samples;
  for (const auto& row : manifest.rows()) {
    if (row.image_path.empty() || row.mask_path.empty()) continue;
    CampaignSample s{row.image_id, row.condition, overlay_path_for(out_dir, row), row.mask_path,
                     std::nullopt};
    if (with_stats) s.stats = overlay_stats(read_gray_png(row.mask_path));
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace segjudge
