// Copyright 2026 The TTML Authors
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

#ifndef TTML_COMMON_ERROR_H_
#define TTML_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ttml {

// Every failure the library reports carries one of these codes. The C API
// mirrors them one-to-one in ttml_status.
enum class ErrorCode {
  kShapeMismatch = 1,
  kNonFinite,
  kFormatError,
  kValidationError,
  kInvalidTruncation,
  kIoError,
  kDecodeError,
  kUnsupportedFormat,
  kUnsupportedEncoding,
  kEmptyAfterTrim,
  kTooShort,
  kEmptyDataset,
  kStaleCache,
  kClassMismatch,
  kDegenerateDataset,
  kMissingLabels,
  kAlreadyQuantized,
  kNoClasses,
  kEmptyClass,
  kMixedLayout,
  kPreprocessingMismatch,
  kConfigError,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

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

}  // namespace ttml

#endif  // TTML_COMMON_ERROR_H_
