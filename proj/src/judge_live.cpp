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

#include "httplib.h"

#include <chrono>
#include <cmath>
#include <regex>
#include <thread>

#include "segjudge/judge.hpp"
#include "segjudge/raster.hpp"

namespace segjudge {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/\s]+)(/\S*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorCode::InvalidConfig, "malformed endpoint url: " + url);
  }
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

using Clock = std::chrono::steady_clock;

}  // namespace

void JudgeConfig::validate() const {
  const auto bad = [](const std::string& why) { return Error(ErrorCode::InvalidConfig, "judge: " + why); };
  parse_endpoint(endpoint);
  if (model.empty()) throw bad("model must be set");
  if (max_retries < 0) throw bad("max_retries must be >= 0");
  if (max_parallel < 1) throw bad("max_parallel must be >= 1");
  if (!(timeout_s > 0.0)) throw bad("timeout_s must be > 0");
  if (retry_backoff_ms < 0) throw bad("retry_backoff_ms must be >= 0");
  if (temperature && !(*temperature >= 0.0)) throw bad("temperature must be >= 0");
  if (top_p && !(*top_p > 0.0 && *top_p <= 1.0)) throw bad("top_p must be in (0,1]");
}

nlohmann::json build_chat_request(std::span<const std::uint8_t> overlay_png,
                                  const RenderedPrompt& prompt, const JudgeConfig& config) {
  nlohmann::json schema = nlohmann::json::parse(verdict_schema().dump());
  nlohmann::json body = {
      {"model", config.model},
      {"messages",
       {{{"role", "user"},
         {"content",
          {{{"type", "text"}, {"text", prompt.text}},
           {{"type", "image_url"},
            {"image_url", {{"url", "data:image/png;base64," + base64_encode(overlay_png)}}}}}}}}},
      {"response_format",
       {{"type", "json_schema"},
        {"json_schema", {{"name", "overlay_verdict"}, {"strict", true}, {"schema", schema}}}}}};
  if (config.temperature) body["temperature"] = *config.temperature;
  if (config.top_p) body["top_p"] = *config.top_p;
  return body;
}

RawVerdict parse_chat_response(std::string_view body) {
  const auto violation = [](const std::string& why) { return Error(ErrorCode::SchemaViolation, why); };
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw violation("response body is not JSON");
  const nlohmann::json* content = nullptr;
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const auto& msg = doc["choices"][0];
    if (msg.contains("message") && msg["message"].contains("content")) {
      content = &msg["message"]["content"];
    }
  }
  if (content == nullptr || !content->is_string()) throw violation("no message content");

  nlohmann::json verdict = nlohmann::json::parse(content->get<std::string>(), nullptr, false);
  if (verdict.is_discarded() || !verdict.is_object()) throw violation("content is not a JSON object");

  RawVerdict raw;
  for (const char* field : {"score", "confidence", "explanation"}) {
    if (!verdict.contains(field)) throw violation(std::string("missing field ") + field);
  }
  const auto& score = verdict["score"];
  if (!score.is_number_integer()) throw violation("score is not an integer");
  raw.score = score.get<long long>();
  const auto& conf = verdict["confidence"];
  if (!conf.is_number()) throw violation("confidence is not a number");
  raw.confidence = conf.get<double>();
  const auto& expl = verdict["explanation"];
  if (!expl.is_string()) throw violation("explanation is not a string");
  raw.explanation = expl.get<std::string>();
  return raw;
}

JudgeOutcome evaluate_live(std::span<const std::uint8_t> overlay_png,
                           const RenderedPrompt& prompt, const JudgeConfig& config,
                           const std::string& api_key) {
  const Endpoint ep = parse_endpoint(config.endpoint);
  const std::string body = build_chat_request(overlay_png, prompt, config).dump();

  httplib::Client client(ep.origin);
  const auto secs = static_cast<time_t>(config.timeout_s);
  const auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  JudgeOutcome out;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0 && config.retry_backoff_ms > 0) {
      const long long wait = static_cast<long long>(config.retry_backoff_ms) << std::min(attempt - 1, 16);
      std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
    out.attempts = attempt + 1;
    const auto start = Clock::now();
    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const double waited = std::chrono::duration<double>(Clock::now() - start).count();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && waited >= config.timeout_s);
      out.error = timed_out ? ErrorCode::Timeout : ErrorCode::TransportFailure;
      out.detail = httplib::to_string(err);
      out.raw_response.clear();
      continue;
    }
    out.raw_response = res->body;
    if (res->status == 401 || res->status == 403) {
      out.error = ErrorCode::AuthFailure;
      out.detail = "HTTP " + std::to_string(res->status);
      return out;
    }
    if (res->status < 200 || res->status >= 300) {
      out.error = ErrorCode::TransportFailure;
      out.detail = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      RawVerdict raw = parse_chat_response(res->body);
      raw.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      out.verdict = validate_verdict(raw);
      out.error.reset();
      out.detail.clear();
      return out;
    } catch (const Error& e) {
      // Out-of-range values are schema violations too; nothing is clamped.
      out.error = ErrorCode::SchemaViolation;
      out.detail = e.what();
    }
  }
  return out;
}

LiveJudge::LiveJudge(JudgeConfig config, RenderedPrompt prompt, std::string api_key)
    : config_(std::move(config)), prompt_(std::move(prompt)), api_key_(std::move(api_key)) {
  config_.validate();
}

nlohmann::ordered_json LiveJudge::settings() const {
  nlohmann::ordered_json s = {{"backend", "live"},
                              {"endpoint", config_.endpoint},
                              {"model", config_.model}};
  // Unset decoding parameters mean the provider's defaults apply.
  s["temperature"] = config_.temperature ? nlohmann::ordered_json(*config_.temperature)
                                         : nlohmann::ordered_json("provider-default");
  s["top_p"] = config_.top_p ? nlohmann::ordered_json(*config_.top_p)
                             : nlohmann::ordered_json("provider-default");
  s["timeout_s"] = config_.timeout_s;
  s["max_retries"] = config_.max_retries;
  s["retry_backoff_ms"] = config_.retry_backoff_ms;
  s["max_parallel"] = config_.max_parallel;
  return s;
}

JudgeOutcome LiveJudge::evaluate(const JudgeRequest& request) {
  std::vector<std::uint8_t> png;
  try {
    png = read_file_bytes(request.overlay_path);
  } catch (const Error& e) {
    JudgeOutcome out;
    out.error = e.code();
    out.detail = e.message();
    return out;
  }
  return evaluate_live(png, prompt_, config_, api_key_);
}

}  // namespace segjudge
