// Copyright 2026 The c3kit Authors. All Rights Reserved.
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

#include <iosfwd>
#include <string>
#include <vector>

namespace c3 {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitIo = 3 };

/// Entry point of the `c3kit` tool. Human-readable tables go to `out`,
/// one JSON object per error or warning goes to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace c3
