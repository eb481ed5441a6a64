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

#include "segjudge/prompt.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <vector>

#include "segjudge/error.hpp"

namespace segjudge {

namespace {

constexpr std::string_view kDefaultRubric = R"(You are reviewing the output of a power line segmentation model used for drone inspection.
The attached image is an aerial RGB frame with the model's predicted power line mask drawn on top as a semi-transparent colored overlay.
Grade how well the highlighted overlay captures the power lines that are actually visible in the frame.

Score rubric (integer 1 to 5):
5 - every visible line is covered and continuous, with no spurious regions.
4 - minor gaps or small spurious fragments; all lines remain recognisable.
3 - noticeable breaks, a missed line, or several false detections.
2 - most line structure is missing or fragmented, or false detections dominate.
1 - unusable: lines absent from the overlay or the overlay is mostly spurious.

Report your confidence in the grade as a number between 0 and 1 (not a percentage), and a one-paragraph explanation of what you see.

Respond with a single JSON object that matches this schema and nothing else:
{{schema}}

Rubric version: {{version}})";

}  // namespace

nlohmann::ordered_json verdict_schema() {
  nlohmann::ordered_json schema = {
      {"type", "object"},
      {"properties",
       {{"score", {{"type", "integer"}, {"minimum", 1}, {"maximum", 5}}},
        {"confidence", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
        {"explanation", {{"type", "string"}}}}},
      {"required", {"score", "confidence", "explanation"}},
      {"additionalProperties", false}};
  return schema;
}

PromptTemplate default_prompt_template() {
  return {"powerline-overlay-v1", std::string(kDefaultRubric), verdict_schema()};
}

RenderedPrompt render_prompt(const PromptTemplate& tmpl) {
  const bool blank = std::all_of(tmpl.text.begin(), tmpl.text.end(),
                                 [](unsigned char c) { return std::isspace(c); });
  if (blank) throw Error(ErrorCode::TemplateMalformed, "empty template text");
  if (tmpl.version.empty()) throw Error(ErrorCode::TemplateMalformed, "missing template version");
  if (!tmpl.schema.is_object()) throw Error(ErrorCode::TemplateMalformed, "schema must be an object");

  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.text.size()) {
    const auto open = tmpl.text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl.text, pos);
      break;
    }
    out.append(tmpl.text, pos, open - pos);
    const auto close = tmpl.text.find("}}", open + 2);
    if (close == std::string::npos) {
      throw Error(ErrorCode::TemplateMalformed, "unterminated placeholder");
    }
    const std::string name = tmpl.text.substr(open + 2, close - open - 2);
    if (name == "schema") {
      out += tmpl.schema.dump(2);
    } else if (name == "version") {
      out += tmpl.version;
    } else {
      throw Error(ErrorCode::TemplateMalformed, "unknown placeholder {{" + name + "}}");
    }
    pos = close + 2;
  }
  return {out, sha256_hex(out)};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoFailure, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::vector<unsigned char> out(4 * ((bytes.size() + 2) / 3) + 1);
  const int n = EVP_EncodeBlock(out.data(), bytes.data(), static_cast<int>(bytes.size()));
  return std::string(reinterpret_cast<const char*>(out.data()), static_cast<std::size_t>(n));
}

}  // namespace segjudge
