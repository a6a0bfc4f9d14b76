// Copyright 2026 The xsum-forge Authors.
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

#include <stdexcept>
#include <string>

namespace xsf {

// Mirrors xsf_status in the C header; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kNotFound = 3,
  kParse = 4,
  kFormat = 5,
  kDimension = 6,
  kNorm = 7,
  kDuplicateId = 8,
  kUnknownId = 9,
  kEmpty = 10,
  kConsistency = 11,
  kConfig = 12,
  kInternal = 13,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace xsf
