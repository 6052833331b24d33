#include "weightlab/error.hpp"

namespace weightlab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidForDomain: return "InvalidForDomain";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::WeightInvalid: return "WeightInvalid";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::MaximizerAtBoundary: return "MaximizerAtBoundary";
    case ErrorCode::GridLimited: return "GridLimited";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewLevels: return "TooFewLevels";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::SequencePropertyViolation: return "SequencePropertyViolation";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace weightlab
