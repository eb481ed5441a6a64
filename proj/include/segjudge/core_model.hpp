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

// Shared domain vocabulary: corruption conditions, judge verdicts and the
// run records a campaign persists.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "segjudge/error.hpp"

namespace segjudge {

enum class Family : std::uint8_t { Clean, Fog, Rain, Shadow, Snow, Sunflare };

inline constexpr std::array<Family, 5> kCorruptionFamilies = {
    Family::Fog, Family::Rain, Family::Shadow, Family::Snow, Family::Sunflare};

inline constexpr int kMaxSeverity = 3;

std::string_view family_name(Family family);
/// Throws Error(UnknownFamily).
Family parse_family(std::string_view name);

/// A (family, severity) pair. Clean is modeled as severity 0 of its own
/// family so clean/corrupted pairing needs no special case.
class Condition {
 public:
  /// Throws SeverityOutOfRange when the pair violates the clean <=> 0 rule.
  Condition(Family family, int severity);

  static Condition clean() { return Condition(Family::Clean, 0); }

  Family family() const noexcept { return family_; }
  int severity() const noexcept { return severity_; }
  bool is_clean() const noexcept { return family_ == Family::Clean; }

  friend auto operator<=>(const Condition&, const Condition&) = default;

 private:
  Family family_;
  int severity_;
};

/// "<family>-<severity>", e.g. "fog-2" or "clean-0".
std::string encode_condition(const Condition& condition);
Condition decode_condition(std::string_view token);

struct JudgeVerdict {
  int score = 0;
  double confidence = 0.0;
  std::string explanation;
  double latency_ms = 0.0;

  friend bool operator==(const JudgeVerdict&, const JudgeVerdict&) = default;
};

/// Verdict fields as parsed from an untrusted source, before range checks.
struct RawVerdict {
  std::optional<long long> score;
  std::optional<double> confidence;
  std::optional<std::string> explanation;
  std::optional<double> latency_ms;
};

/// Accepts or rejects; never clamps. Out-of-range values raise
/// ScoreOutOfRange / ConfidenceOutOfRange / LatencyOutOfRange, absent
/// fields raise MissingField.
JudgeVerdict validate_verdict(const RawVerdict& raw);

enum class RunStatus : std::uint8_t { Ok, Failed };

struct RunKey {
  std::string image_id;
  Condition condition = Condition::clean();
  int run_index = 0;

  friend auto operator<=>(const RunKey&, const RunKey&) = default;
};

struct RunRecord {
  std::string image_id;
  Condition condition = Condition::clean();
  int run_index = 0;
  RunStatus status = RunStatus::Ok;
  /// Present iff status == Ok.
  std::optional<JudgeVerdict> verdict;
  std::string judge_id;
  std::string prompt_hash;
  std::string timestamp;  // ISO-8601 UTC
  std::string raw_error;
  int attempts = 1;

  RunKey key() const { return {image_id, condition, run_index}; }
  bool ok() const noexcept { return status == RunStatus::Ok; }
};

}  // namespace segjudge
