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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "segjudge/judge.hpp"
#include "segjudge/metrics.hpp"
#include "segjudge/overlay.hpp"

namespace segjudge {

/// Everything a pipeline run holds fixed. Loaded from one JSON file; the
/// CLI flags override individual keys.
struct HarnessConfig {
  /// Input manifest. Empty means "<out>/manifest.csv".
  std::filesystem::path manifest;
  std::filesystem::path out = "out";
  /// Empty means "<out>/runs.jsonl".
  std::filesystem::path store;

  std::uint64_t seed = 0;
  std::vector<Family> families{kCorruptionFamilies.begin(), kCorruptionFamilies.end()};
  std::vector<int> severities{1, 2, 3};

  OverlayStyle overlay;

  std::string backend = "mock";  // "mock" or "live"
  JudgeConfig judge;
  MockJudgeProfile mock;

  int runs = 5;
  Tolerance tolerance;
  double failure_ceiling = 0.1;
  bool pool_severities = false;
  bool sync_each_append = false;
  /// Worker threads for corpus corruption and overlay rendering.
  int workers = 4;

  std::filesystem::path manifest_path() const;
  std::filesystem::path store_path() const;
  std::filesystem::path reports_dir() const { return out / "reports"; }

  /// Throws InvalidConfig.
  void validate() const;
};

/// Unknown keys are rejected so typos cannot silently fall back to
/// defaults. Throws InvalidConfig; relative paths resolve against `base`.
HarnessConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
HarnessConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const HarnessConfig& config);

std::vector<Family> parse_family_list(const std::string& csv);
std::vector<int> parse_severity_list(const std::string& csv);

}  // namespace segjudge
