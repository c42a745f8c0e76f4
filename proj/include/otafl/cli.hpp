/**
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OTAFL_CLI_HPP_
#define OTAFL_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace otafl {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kManifestSchemaVersion = 1;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;   // optimizer or simulation failure
inline constexpr int kExitUsageError = 2;     // bad flags or bad config
inline constexpr int kExitCheckFailed = 3;    // a self-check command found a violation

// Entry point behind the command-line tool. `args` excludes the program name.
// Progress and results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otafl

#endif  // OTAFL_CLI_HPP_
