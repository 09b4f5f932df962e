#include "switchtaylor/error.hpp"

namespace switchtaylor {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConsecutiveJumpComponents: return "ConsecutiveJumpComponents";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::ComponentOutOfAlphabet: return "ComponentOutOfAlphabet";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::InvalidGenerator: return "InvalidGenerator";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::IntervalOutOfRange: return "IntervalOutOfRange";
    case ErrorCode::SameStatePair: return "SameStatePair";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NotAGridTime: return "NotAGridTime";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::UnsupportedWordLength: return "UnsupportedWordLength";
    case ErrorCode::NonFiniteDerivative: return "NonFiniteDerivative";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::CommutativityRequired: return "CommutativityRequired";
    case ErrorCode::ReferenceNotFiner: return "ReferenceNotFiner";
    case ErrorCode::StepTooLargeForChain: return "StepTooLargeForChain";
    case ErrorCode::InsufficientLevels: return "InsufficientLevels";
    case ErrorCode::NonPositiveError: return "NonPositiveError";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownModel: return "UnknownModel";
  }
  return "Unknown";
}

}  // namespace switchtaylor
