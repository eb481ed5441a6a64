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

#include <atomic>
#include <string>
#include <vector>

#include "segjudge/error.hpp"

namespace segjudge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitCampaign = 4;
inline constexpr int kExitIncomplete = 5;

int exit_code_for(ErrorCode code);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Progress goes to stderr, results to files.
int run_cli(const std::vector<std::string>& args, std::atomic<bool>* stop = nullptr);

}  // namespace segjudge
