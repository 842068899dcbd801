/* Copyright 2026 The MVCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mvcnn/error.h"

namespace mvcnn {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedWav: return "MalformedWav";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidOverlap: return "InvalidOverlap";
    case ErrorCode::kInvalidWindow: return "InvalidWindow";
    case ErrorCode::kNonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorCode::kInvalidLength: return "InvalidLength";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidCutoff: return "InvalidCutoff";
    case ErrorCode::kZeroPowerSignal: return "ZeroPowerSignal";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kChannelMismatch: return "ChannelMismatch";
    case ErrorCode::kInputTooShort: return "InputTooShort";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kNotOneHot: return "NotOneHot";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kCrcMismatch: return "CrcMismatch";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kUsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace mvcnn
