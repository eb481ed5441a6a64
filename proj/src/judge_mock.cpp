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

#include <algorithm>
#include <charconv>

#include "segjudge/judge.hpp"
#include "segjudge/raster.hpp"
#include "segjudge/rng.hpp"

namespace segjudge {

namespace {

constexpr std::array<std::string_view, 5> kPhraseBank = {
    "The overlay is unusable: power lines are absent or buried under spurious regions.",
    "Most of the line structure is missing or fragmented and false detections dominate.",
    "Lines are partly covered with noticeable breaks and several false detections.",
    "All lines are recognisable with minor gaps and a few small spurious fragments.",
    "Every visible power line is covered continuously with no spurious regions.",
};

// Shortest text that round-trips to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void MockJudgeProfile::validate() const {
  const auto bad = [](const std::string& why) { return Error(ErrorCode::InvalidConfig, "mock profile: " + why); };
  if (!(p_flip >= 0.0 && p_flip <= 1.0)) throw bad("p_flip must be in [0,1]");
  if (!(jitter >= 0.0)) throw bad("jitter must be >= 0");
  if (!(good_coverage_min <= good_coverage_max)) throw bad("empty good coverage band");
  for (const auto* table : {&good_scores, &poor_scores}) {
    for (int s : *table) {
      if (s < 1 || s > 5) throw bad("base scores must lie in 1..5");
    }
  }
}

std::string MockJudgeProfile::judge_id() const {
  std::string id = "mock-v1/seed=" + std::to_string(seed) + "/p_flip=" + format_double(p_flip) +
                   "/conf=" + format_double(confidence_base) + "-" +
                   format_double(confidence_slope) + "/jitter=" + format_double(jitter) +
                   "/band=" + format_double(good_coverage_min) + ".." +
                   format_double(good_coverage_max) + "/scores=";
  for (int s : good_scores) id += std::to_string(s);
  id += ":";
  for (int s : poor_scores) id += std::to_string(s);
  return id;
}

JudgeVerdict evaluate_mock(const OverlayStats& stats, std::string_view image_id,
                           const Condition& condition, int run_index,
                           const MockJudgeProfile& profile) {
  std::string key = std::to_string(profile.seed);
  key += '|';
  key += image_id;
  key += '|';
  key += encode_condition(condition);
  key += '|';
  key += std::to_string(run_index);
  SplitMix64 rng(fnv1a64(key));
  // Fixed draw order: flip, direction, jitter, latency.
  const double u_flip = rng.uniform();
  const double u_dir = rng.uniform();
  const double u_jitter = rng.uniform(-1.0, 1.0);
  const double u_latency = rng.uniform(50.0, 150.0);

  const bool good = stats.coverage_fraction >= profile.good_coverage_min &&
                    stats.coverage_fraction <= profile.good_coverage_max;
  const int sev = condition.severity();
  int score = good ? profile.good_scores[sev] : profile.poor_scores[sev];
  if (u_flip < profile.p_flip) {
    // Off-by-one deviation that always stays on the 1..5 scale.
    if (score == 5) {
      score = 4;
    } else if (score == 1) {
      score = 2;
    } else {
      score += u_dir < 0.5 ? -1 : 1;
    }
  }
  score = std::clamp(score, 1, 5);

  const double confidence =
      std::clamp(profile.confidence_base - profile.confidence_slope * sev +
                     profile.jitter * u_jitter,
                 0.0, 1.0);

  RawVerdict raw;
  raw.score = score;
  raw.confidence = confidence;
  raw.explanation = std::string(kPhraseBank[static_cast<std::size_t>(score - 1)]);
  raw.latency_ms = u_latency;
  return validate_verdict(raw);
}

MockJudge::MockJudge(MockJudgeProfile profile) : profile_(profile) { profile_.validate(); }

nlohmann::ordered_json MockJudge::settings() const {
  return {{"backend", "mock"},
          {"seed", profile_.seed},
          {"p_flip", profile_.p_flip},
          {"confidence_base", profile_.confidence_base},
          {"confidence_slope", profile_.confidence_slope},
          {"jitter", profile_.jitter},
          {"good_coverage", {profile_.good_coverage_min, profile_.good_coverage_max}},
          {"good_scores", profile_.good_scores},
          {"poor_scores", profile_.poor_scores}};
}

JudgeOutcome MockJudge::evaluate(const JudgeRequest& request) {
  JudgeOutcome out;
  out.attempts = 1;
  try {
    const OverlayStats stats =
        request.stats ? *request.stats : overlay_stats(read_gray_png(request.mask_path));
    out.verdict = evaluate_mock(stats, request.image_id, request.condition,
                                request.run_index, profile_);
  } catch (const Error& e) {
    out.error = e.code();
    out.detail = e.message();
  }
  return out;
}

}  // namespace segjudge
