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

#ifndef DPMARKET_ERROR_HPP_
#define DPMARKET_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpmarket {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kMalformedInput,
  kAuthenticationFailed,
  kWrongPhase,
  kDuplicateAddress,
  kThresholdNotMet,
  kWrongAmount,
  kRevealMismatch,
  kMissingRecord,
  kIntegrityFailure,
  kParseError,
};

std::string_view ToString(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dpmarket

#endif  // DPMARKET_ERROR_HPP_
