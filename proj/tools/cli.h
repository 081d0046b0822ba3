// Copyright 2026 The robustsf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ROBUSTSF_TOOLS_CLI_H_
#define ROBUSTSF_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace robustsf::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitConfig = 3;

// Environment variable naming the default output directory.
inline constexpr const char* kOutputEnv = "ROBUSTSF_OUT";

// Runs the command line `args` (without the program name). Reports go to
// `out`, one-line diagnostics to `err`; `in` backs "-" inputs.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::istream& in);

}  // namespace robustsf::cli

#endif  // ROBUSTSF_TOOLS_CLI_H_
