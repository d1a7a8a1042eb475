// Copyright 2026 The RepAL Toolkit Authors.
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

#ifndef REPAL_CLI_APP_HPP_
#define REPAL_CLI_APP_HPP_

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace repal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitEncoder = 3;

// Runs the repal command line. args excludes the program name. Results go to
// out, diagnostics to err; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 3 for encoder and transport failures, 2 for everything else.
int exit_code_for(const std::exception& e);

}  // namespace repal::cli

#endif  // REPAL_CLI_APP_HPP_
