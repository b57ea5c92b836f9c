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

#include "common/error.h"

namespace ttml {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kInvalidTruncation: return "InvalidTruncation";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kEmptyAfterTrim: return "EmptyAfterTrim";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kStaleCache: return "StaleCache";
    case ErrorCode::kClassMismatch: return "ClassMismatch";
    case ErrorCode::kDegenerateDataset: return "DegenerateDataset";
    case ErrorCode::kMissingLabels: return "MissingLabels";
    case ErrorCode::kAlreadyQuantized: return "AlreadyQuantized";
    case ErrorCode::kNoClasses: return "NoClasses";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kMixedLayout: return "MixedLayout";
    case ErrorCode::kPreprocessingMismatch: return "PreprocessingMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace ttml
