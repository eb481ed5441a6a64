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
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace segjudge {

/// Rubric text plus the output schema the judge must follow. The text may
/// reference `{{schema}}` and `{{version}}`; any other placeholder is
/// malformed.
struct PromptTemplate {
  std::string version;
  std::string text;
  nlohmann::ordered_json schema;
};

struct RenderedPrompt {
  std::string text;
  std::string prompt_hash;  // sha256 hex of text
};

/// The versioned rubric shipped with the harness.
PromptTemplate default_prompt_template();
nlohmann::ordered_json verdict_schema();

/// Throws TemplateMalformed.
RenderedPrompt render_prompt(const PromptTemplate& tmpl);

std::string sha256_hex(std::string_view data);
std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace segjudge
