#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iqcfact {

/// Failure categories raised by the library. The CLI reports them by name.
enum class ErrorCode {
  kPoleProximity,
  kRootFindingFailure,
  kInvalidPole,
  kUnpairedComplexPole,
  kDimensionMismatch,
  kSingularEntry,
  kImproperEntry,
  kSingularFeedthrough,
  kUnstableInput,
  kNotParaHermitian,
  kNotPositiveOnAxis,
  kNotInRLinf,
  kUnsupportedBlockSizes,
  kNotPositiveNegative,
  kWrongInertiaAtInfinity,
  kRiccatiFailure,
  kFactorizationCheckFailed,
  kUnstableG,
  kUnstableDelta,
  kConditionNotSatisfied,
  kGridMismatch,
  kTailEnergy,
  kNotBiproper,
  kUnstableInverse,
  kInvalidArgument,
  kParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPoleProximity: return "PoleProximity";
    case ErrorCode::kRootFindingFailure: return "RootFindingFailure";
    case ErrorCode::kInvalidPole: return "InvalidPole";
    case ErrorCode::kUnpairedComplexPole: return "UnpairedComplexPole";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularEntry: return "SingularEntry";
    case ErrorCode::kImproperEntry: return "ImproperEntry";
    case ErrorCode::kSingularFeedthrough: return "SingularFeedthrough";
    case ErrorCode::kUnstableInput: return "UnstableInput";
    case ErrorCode::kNotParaHermitian: return "NotParaHermitian";
    case ErrorCode::kNotPositiveOnAxis: return "NotPositiveOnAxis";
    case ErrorCode::kNotInRLinf: return "NotInRLinf";
    case ErrorCode::kUnsupportedBlockSizes: return "UnsupportedBlockSizes";
    case ErrorCode::kNotPositiveNegative: return "NotPositiveNegative";
    case ErrorCode::kWrongInertiaAtInfinity: return "WrongInertiaAtInfinity";
    case ErrorCode::kRiccatiFailure: return "RiccatiFailure";
    case ErrorCode::kFactorizationCheckFailed: return "FactorizationCheckFailed";
    case ErrorCode::kUnstableG: return "UnstableG";
    case ErrorCode::kUnstableDelta: return "UnstableDelta";
    case ErrorCode::kConditionNotSatisfied: return "ConditionNotSatisfied";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kTailEnergy: return "TailEnergy";
    case ErrorCode::kNotBiproper: return "NotBiproper";
    case ErrorCode::kUnstableInverse: return "UnstableInverse";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iqcfact
