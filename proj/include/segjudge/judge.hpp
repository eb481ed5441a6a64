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

// Judge backends. A backend turns one overlay into a validated verdict or
// a classified failure; it never clamps or coerces what a model returns.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "segjudge/core_model.hpp"
#include "segjudge/overlay.hpp"
#include "segjudge/prompt.hpp"

namespace segjudge {

struct JudgeConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  /// Unset means "provider default"; both are echoed into run metadata.
  std::optional<double> temperature;
  std::optional<double> top_p;
  double timeout_s = 60.0;
  int max_retries = 3;
  int retry_backoff_ms = 1000;
  int max_parallel = 4;
  std::string api_key_env = "OPENAI_API_KEY";

  /// Throws InvalidConfig.
  void validate() const;
};

/// Deterministic stand-in for a live model, keyed on
/// (seed, image_id, condition, run_index).
struct MockJudgeProfile {
  std::uint64_t seed = 0;
  /// Probability of an off-by-one score deviation on one run.
  double p_flip = 0.0;
  double confidence_base = 0.95;
  /// Confidence drop per severity level.
  double confidence_slope = 0.2;
  /// Half-width of the uniform confidence jitter; 0 disables it.
  double jitter = 0.01;
  /// Mask coverage band regarded as a plausible power line prediction.
  double good_coverage_min = 0.001;
  double good_coverage_max = 0.5;
  /// Base score by severity 0..3, inside and outside the good band.
  std::array<int, 4> good_scores{5, 4, 3, 2};
  std::array<int, 4> poor_scores{3, 2, 2, 1};

  /// Throws InvalidConfig.
  void validate() const;
  std::string judge_id() const;
};

JudgeVerdict evaluate_mock(const OverlayStats& stats, std::string_view image_id,
                           const Condition& condition, int run_index,
                           const MockJudgeProfile& profile);

/// A verdict, or the classified reason there is none.
struct JudgeOutcome {
  std::optional<JudgeVerdict> verdict;
  std::optional<ErrorCode> error;
  std::string detail;
  /// Last raw response body, kept for audit.
  std::string raw_response;
  int attempts = 0;

  bool ok() const noexcept { return verdict.has_value(); }
};

/// Chat-completions request body with the overlay inlined as a base64
/// PNG data URL and a strict JSON-schema response format.
nlohmann::json build_chat_request(std::span<const std::uint8_t> overlay_png,
                                  const RenderedPrompt& prompt, const JudgeConfig& config);

/// Extracts the verdict fields from a chat-completions response body.
/// Type violations (non-integer score, non-numeric confidence, missing
/// fields, unparseable content) raise SchemaViolation. Range checks are
/// left to validate_verdict.
RawVerdict parse_chat_response(std::string_view body);

/// POSTs to the endpoint, retrying transport errors and schema violations
/// up to max_retries times with exponential backoff. Authentication
/// failures are not retried. latency_ms covers the successful attempt,
/// from request start to parsed verdict.
JudgeOutcome evaluate_live(std::span<const std::uint8_t> overlay_png,
                           const RenderedPrompt& prompt, const JudgeConfig& config,
                           const std::string& api_key);

struct JudgeRequest {
  std::string image_id;
  Condition condition = Condition::clean();
  int run_index = 0;
  std::filesystem::path overlay_path;
  std::filesystem::path mask_path;
  std::optional<OverlayStats> stats;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::string judge_id() const = 0;
  virtual std::string backend_name() const = 0;
  /// Provenance echoed into campaign metadata.
  virtual nlohmann::ordered_json settings() const = 0;
  /// Must be safe to call concurrently.
  virtual JudgeOutcome evaluate(const JudgeRequest& request) = 0;
  /// Whether evaluate() needs overlay statistics rather than pixels.
  virtual bool needs_stats() const { return false; }
};

class MockJudge final : public JudgeBackend {
 public:
  explicit MockJudge(MockJudgeProfile profile);
  std::string judge_id() const override { return profile_.judge_id(); }
  std::string backend_name() const override { return "mock"; }
  nlohmann::ordered_json settings() const override;
  JudgeOutcome evaluate(const JudgeRequest& request) override;
  bool needs_stats() const override { return true; }

 private:
  MockJudgeProfile profile_;
};

class LiveJudge final : public JudgeBackend {
 public:
  LiveJudge(JudgeConfig config, RenderedPrompt prompt, std::string api_key);
  std::string judge_id() const override { return config_.model; }
  std::string backend_name() const override { return "live"; }
  nlohmann::ordered_json settings() const override;
  JudgeOutcome evaluate(const JudgeRequest& request) override;

 private:
  JudgeConfig config_;
  RenderedPrompt prompt_;
  std::string api_key_;
};

}  // namespace segjudge
