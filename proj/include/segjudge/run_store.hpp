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

// Append-only run log. One JSON object per line; campaign metadata lives in
// a "<store>.meta.json" sidecar. While a campaign is open, lines are
// appended in arrival order with one write() each, so an interrupted
// campaign leaves at most a truncated last line, which is dropped when the
// store is reopened. Closing rewrites the log sorted by
// (image_id, condition, run_index).

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "segjudge/core_model.hpp"
#include "segjudge/metrics.hpp"

namespace segjudge {

struct CampaignMeta {
  std::string judge_id;
  std::string prompt_hash;
  int runs = 0;
  std::string backend;
  std::string started_at;
  /// Free-form provenance (decoding parameters, overlay style, prompt
  /// version) echoed from the configuration.
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
};

struct RunSet {
  CampaignMeta meta;
  std::vector<RunRecord> records;
};

std::string utc_now_iso8601();

std::string record_to_json_line(const RunRecord& record);
/// Throws ParseError.
RunRecord record_from_json_line(std::string_view line, std::size_t line_no = 0);

std::filesystem::path meta_path_for(const std::filesystem::path& store_path);

class RunStore {
 public:
  struct Options {
    /// fdatasync after each append.
    bool sync_each_append = false;
  };

  /// Creates the store or reopens it for resumption. Reopening requires
  /// matching judge_id, prompt_hash and run count (CampaignMismatch).
  static RunStore open(const std::filesystem::path& path, const CampaignMeta& meta,
                       Options options);
  static RunStore open(const std::filesystem::path& path, const CampaignMeta& meta) {
    return open(path, meta, Options{});
  }

  RunStore(RunStore&& other) noexcept;
  RunStore& operator=(RunStore&& other) noexcept;
  RunStore(const RunStore&) = delete;
  RunStore& operator=(const RunStore&) = delete;
  ~RunStore();

  /// Throws StoreClosed, DuplicateRun, CampaignMismatch, InvalidSpec,
  /// IoFailure.
  void append(const RunRecord& record);

  bool contains(const RunKey& key) const { return keys_.count(key) > 0; }
  std::size_t size() const noexcept { return records_.size(); }
  const CampaignMeta& meta() const noexcept { return meta_; }
  bool closed() const noexcept { return fd_ < 0; }

  /// Rewrites the log in sorted order and closes it. Idempotent.
  void close();

  RunSet snapshot() const { return {meta_, records_}; }

 private:
  RunStore() = default;

  std::filesystem::path path_;
  CampaignMeta meta_;
  Options options_;
  int fd_ = -1;
  std::set<RunKey> keys_;
  std::vector<RunRecord> records_;
};

/// Reads a store (open or closed) without modifying it. A truncated final
/// line is ignored.
RunSet load_run_set(const std::filesystem::path& path);

/// Combines stores of one campaign configuration. Throws CampaignMismatch
/// when judge_id, prompt_hash or run count differ, DuplicateRun on
/// overlapping keys.
RunSet merge_run_sets(const std::vector<RunSet>& sets);

void sort_records(std::vector<RunRecord>& records);

// --- grouping --------------------------------------------------------------

struct RunGroup {
  std::string image_id;
  Condition condition = Condition::clean();
  /// Ordered by run index 1..R.
  std::vector<JudgeVerdict> verdicts;
};

struct IncompleteGroup {
  std::string image_id;
  Condition condition = Condition::clean();
  int ok = 0;
  int failed = 0;
  int missing = 0;
};

struct GroupedRuns {
  std::vector<RunGroup> complete;
  std::vector<IncompleteGroup> incomplete;
};

using ConditionFilter = std::function<bool(const Condition&)>;

/// Complete groups hold exactly R ok verdicts with run indices 1..R; every
/// other (image, condition) present is reported as incomplete.
GroupedRuns group_runs(const RunSet& set, const ConditionFilter& filter = {});

ScoreTuples score_tuples(const std::vector<RunGroup>& groups);
ConfidenceTuples confidence_tuples(const std::vector<RunGroup>& groups);
TextTuples explanation_tuples(const std::vector<RunGroup>& groups);

// --- pairing ---------------------------------------------------------------

struct PairedCell {
  Condition condition = Condition::clean();
  /// reference minus target, matched on image id and run index.
  std::vector<Residual> residuals;
  int images_paired = 0;
  /// Images with a group on only one side, or an incomplete group.
  int images_excluded = 0;

  std::vector<double> score_residuals() const;
  std::vector<double> confidence_residuals() const;
};

using PairedResiduals = std::map<Condition, PairedCell>;

/// Residuals of `target` against `reference` within one run set. Throws
/// CampaignMismatch when records on the two sides disagree on judge or
/// prompt.
PairedCell pair_conditions(const RunSet& set, const Condition& reference,
                           const Condition& target);

/// One cell per corrupted condition present in the set, paired with clean.
PairedResiduals pair_with_clean(const RunSet& set);
/// Clean and corrupted campaigns stored separately. Throws CampaignMismatch
/// when prompt hash, judge or run count differ.
PairedResiduals pair_with_clean(const RunSet& clean, const RunSet& corrupted);

}  // namespace segjudge
