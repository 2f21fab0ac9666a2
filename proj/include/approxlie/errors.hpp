#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace approxlie {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& expected)
      : Error("syntax error at position " + std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(expected) {}

  // 1-based column of the offending character.
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

#define APPROXLIE_ERROR(Name)          \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  };

APPROXLIE_ERROR(UnknownFunction)
APPROXLIE_ERROR(UnknownSymbol)
APPROXLIE_ERROR(CircularSubstitution)
APPROXLIE_ERROR(DivisionByZeroExpr)
APPROXLIE_ERROR(NotPolynomial)
APPROXLIE_ERROR(UnknownDependent)
APPROXLIE_ERROR(OrderOverflow)
APPROXLIE_ERROR(OrderMismatch)
APPROXLIE_ERROR(JetDepthExceeded)
APPROXLIE_ERROR(UnsupportedOrder)
APPROXLIE_ERROR(NotAffine)
APPROXLIE_ERROR(InconsistentChoice)
APPROXLIE_ERROR(FixpointExceeded)
APPROXLIE_ERROR(InvalidCaseParams)
APPROXLIE_ERROR(UnknownFamily)
APPROXLIE_ERROR(ExtractionFailure)
APPROXLIE_ERROR(MissingBinding)
APPROXLIE_ERROR(NumericSingularity)
APPROXLIE_ERROR(ConfigError)

#undef APPROXLIE_ERROR

}  // namespace approxlie
