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

// Minimal RFC 4180 reading and writing: comma separated, double-quoted
// fields may contain commas and doubled quotes. Fields never span lines.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segjudge::csv {

/// nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

std::string quote(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace segjudge::csv
