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

#include "segjudge/core_model.hpp"

#include <charconv>
#include <cmath>

namespace segjudge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::LatencyOutOfRange: return "LatencyOutOfRange";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::SeverityOutOfRange: return "SeverityOutOfRange";
    case ErrorCode::MalformedToken: return "MalformedToken";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonBinaryMask: return "NonBinaryMask";
    case ErrorCode::TemplateMalformed: return "TemplateMalformed";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportFailure: return "TransportFailure";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::CampaignAborted: return "CampaignAborted";
    case ErrorCode::PartialCampaign: return "PartialCampaign";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::MissingCleanReference: return "MissingCleanReference";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DuplicateRun: return "DuplicateRun";
    case ErrorCode::StoreClosed: return "StoreClosed";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CampaignMismatch: return "CampaignMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MisalignedGroups: return "MisalignedGroups";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::AllTied: return "AllTied";
    case ErrorCode::AllZeroResiduals: return "AllZeroResiduals";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IncompleteData: return "IncompleteData";
  }
  return "Unknown";
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Clean: return "clean";
    case Family::Fog: return "fog";
    case Family::Rain: return "rain";
    case Family::Snow: return "snow";
    case Family::Shadow: return "shadow";
    case Family::Sunflare: return "sunflare";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Clean, Family::Fog, Family::Rain, Family::Snow,
                   Family::Shadow, Family::Sunflare}) {
    if (family_name(f) == name) return f;
  }
  throw Error(ErrorCode::UnknownFamily, "unknown corruption family '" +
                                            std::string(name) + "'");
}

Condition::Condition(Family family, int severity)
    : family_(family), severity_(severity) {
  const bool ok = family == Family::Clean
                      ? severity == 0
                      : (severity >= 1 && severity <= kMaxSeverity);
  if (!ok) {
    throw Error(ErrorCode::SeverityOutOfRange,
                "severity " + std::to_string(severity) + " is invalid for " +
                    std::string(family_name(family)));
  }
}

std::string encode_condition(const Condition& condition) {
  return std::string(family_name(condition.family())) + "-" +
         std::to_string(condition.severity());
}

Condition decode_condition(std::string_view token) {
  const auto dash = token.rfind('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == token.size()) {
    throw Error(ErrorCode::MalformedToken,
                "expected <family>-<severity>, got '" + std::string(token) + "'");
  }
  const Family family = parse_family(token.substr(0, dash));
  const auto digits = token.substr(dash + 1);
  int severity = 0;
  const auto [end, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), severity);
  if (ec != std::errc{} || end != digits.data() + digits.size()) {
    throw Error(ErrorCode::MalformedToken,
                "non-numeric severity in '" + std::string(token) + "'");
  }
  return Condition(family, severity);
}

JudgeVerdict validate_verdict(const RawVerdict& raw) {
  if (!raw.score) throw Error(ErrorCode::MissingField, "score");
  if (!raw.confidence) throw Error(ErrorCode::MissingField, "confidence");
  if (!raw.explanation) throw Error(ErrorCode::MissingField, "explanation");
  if (!raw.latency_ms) throw Error(ErrorCode::MissingField, "latency_ms");

  if (*raw.score < 1 || *raw.score > 5) {
    throw Error(ErrorCode::ScoreOutOfRange,
                "score " + std::to_string(*raw.score) + " not in 1..5");
  }
  // Written so that NaN fails the check.
  if (!(*raw.confidence >= 0.0 && *raw.confidence <= 1.0)) {
    throw Error(ErrorCode::ConfidenceOutOfRange,
                "confidence " + std::to_string(*raw.confidence) +
                    " not in [0,1]");
  }
  if (!(*raw.latency_ms >= 0.0) || std::isinf(*raw.latency_ms)) {
    throw Error(ErrorCode::LatencyOutOfRange,
                "latency " + std::to_string(*raw.latency_ms) + " ms");
  }
  return JudgeVerdict{static_cast<int>(*raw.score), *raw.confidence,
                      *raw.explanation, *raw.latency_ms};
}

}  // namespace segjudge
