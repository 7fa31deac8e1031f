// Copyright 2026 The Mutrealism Authors
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

namespace mutrealism {

// Numeric values match the CLI exit codes where one exists.
enum class ErrorCode {
  kInvalidArgument = 1,
  kManifestInvalid = 2,
  kScreeningBlock = 3,
  kSubjectUntrainable = 4,
  kIo = 5,
  kShapeMismatch = 6,
  kDomainMismatch = 7,
  kNoObservableBehavior = 8,
  kSchema = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mutrealism
