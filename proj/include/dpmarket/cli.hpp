// Copyright 2026 The dpmarket Authors
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

#ifndef DPMARKET_CLI_HPP_
#define DPMARKET_CLI_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dpmarket::cli {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitThreshold = 2,
  kExitDispute = 3,
  kExitUsage = 64,
  kExitParse = 65,
  kExitMissingInput = 66,
};

// Comma-separated integers and inclusive ranges, e.g. "2..5,10" -> 2,3,4,5,10.
std::vector<std::size_t> ParseIndexList(std::string_view text);
std::vector<double> ParseDoubleList(std::string_view text);

// argv[0] is the program name. Results go to `out` unless --output is given;
// diagnostics go to `err`.
int Run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace dpmarket::cli

#endif  // DPMARKET_CLI_HPP_
