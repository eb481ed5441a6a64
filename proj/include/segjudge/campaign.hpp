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

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segjudge/judge.hpp"
#include "segjudge/run_store.hpp"

namespace segjudge {

struct CampaignSample {
  std::string image_id;
  Condition condition = Condition::clean();
  std::filesystem::path overlay_path;
  std::filesystem::path mask_path;
  std::optional<OverlayStats> stats;
};

struct CampaignOptions {
  int runs = 5;
  /// Largest tolerated fraction of failed records among those attempted
  /// in this invocation.
  double failure_ceiling = 0.1;
  int max_parallel = 1;
  /// Checked before each request; set it to interrupt.
  std::atomic<bool>* stop = nullptr;
  /// Called after each persisted record, serialized with the writer.
  std::function<void(const RunRecord&)> on_record;
  /// Timestamp source for records. Defaults to the UTC wall clock.
  std::function<std::string()> clock;
};

struct CampaignSummary {
  std::size_t planned = 0;   // N * R
  std::size_t skipped = 0;   // already present in the store
  std::size_t succeeded = 0;
  std::size_t failed = 0;
};

/// Evaluates every (sample, run) not yet present in the store and appends
/// one record each, successful or failed. The store is closed (and thereby
/// sorted) once all pending work is done.
///
/// Throws AuthFailure immediately on rejected credentials, PartialCampaign
/// when stopped early (rerun to resume), CampaignAborted when the failure
/// rate exceeds the ceiling, and InvalidConfig for bad options.
CampaignSummary run_campaign(const std::vector<CampaignSample>& samples, JudgeBackend& backend,
                             RunStore& store, const CampaignOptions& options);

/// Timestamp source that always returns the Unix epoch; keeps mock stores
/// byte-reproducible.
std::string epoch_clock();

}  // namespace segjudge
