// Copyright 2026  The lavoce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lavoce {

enum class Errc {
  kEmptySignal,
  kNonFiniteSample,
  kShapeMismatch,
  kMinFrames,
  kSilentSignal,
  kLengthMismatch,
  kUnknownCondition,
  kBadHeader,
  kWrongSpatialSize,
  kRateMismatch,
  kTooShort,
  kExternalUnavailable,
  kParseFailure,
  kNonFiniteActivation,
  kNonFiniteLoss,
  kBadMagic,
  kShapeManifestMismatch,
  kInvalidArgument,
  kIo,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::kEmptySignal: return "EmptySignal";
    case Errc::kNonFiniteSample: return "NonFiniteSample";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kMinFrames: return "MinFrames";
    case Errc::kSilentSignal: return "SilentSignal";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kUnknownCondition: return "UnknownCondition";
    case Errc::kBadHeader: return "BadHeader";
    case Errc::kWrongSpatialSize: return "WrongSpatialSize";
    case Errc::kRateMismatch: return "RateMismatch";
    case Errc::kTooShort: return "TooShort";
    case Errc::kExternalUnavailable: return "ExternalUnavailable";
    case Errc::kParseFailure: return "ParseFailure";
    case Errc::kNonFiniteActivation: return "NonFiniteActivation";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kShapeManifestMismatch: return "ShapeManifestMismatch";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type; `code()`
/// identifies the contract that was violated and `what()` carries context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lavoce
