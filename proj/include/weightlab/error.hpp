#pragma once

#include <stdexcept>
#include <string>

namespace weightlab {

enum class ErrorCode {
  UnknownFamily,
  InvalidParams,
  InvalidForDomain,
  OutOfDomain,
  Overflow,
  WeightInvalid,
  DegenerateProfile,
  MaximizerAtBoundary,
  GridLimited,
  OutOfRange,
  TooFewLevels,
  ZeroFunction,
  DomainMismatch,
  SequencePropertyViolation,
  ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the counterexample builders; carries the offending index and property number.
class SequencePropertyViolation : public Error {
 public:
  SequencePropertyViolation(int index, int property, const std::string& what)
      : Error(ErrorCode::SequencePropertyViolation,
              "property (" + std::to_string(property) + ") at n=" + std::to_string(index) + ": " + what),
        index_(index),
        property_(property) {}
  int index() const noexcept { return index_; }
  int property() const noexcept { return property_; }

 private:
  int index_;
  int property_;
};

}  // namespace weightlab
