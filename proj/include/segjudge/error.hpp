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

#include <stdexcept>
#include <string>
#include <string_view>

namespace segjudge {

enum class ErrorCode {
  // verdict / condition validation
  ScoreOutOfRange,
  ConfidenceOutOfRange,
  MissingField,
  LatencyOutOfRange,
  UnknownFamily,
  SeverityOutOfRange,
  MalformedToken,
  // rasters
  EmptyImage,
  InvalidSpec,
  DimensionMismatch,
  NonBinaryMask,
  // judge
  TemplateMalformed,
  Timeout,
  TransportFailure,
  SchemaViolation,
  AuthFailure,
  CampaignAborted,
  PartialCampaign,
  // store / manifest
  ParseError,
  DuplicateKey,
  MissingCleanReference,
  MissingFile,
  DuplicateRun,
  StoreClosed,
  IoFailure,
  CampaignMismatch,
  // statistics
  EmptyInput,
  MisalignedGroups,
  DegenerateInput,
  EmptyCell,
  TooFewSamples,
  ZeroVariance,
  AllTied,
  AllZeroResiduals,
  // cli
  InvalidConfig,
  IncompleteData,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so
/// the CLI can map it onto its exit-status contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace segjudge
