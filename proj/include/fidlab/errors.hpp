#pragma once

#include <stdexcept>
#include <string>

namespace fidlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlgebraMismatch : Error {
  using Error::Error;
};

struct NotSelfadjoint : Error {
  using Error::Error;
};

struct NotPositive : Error {
  using Error::Error;
};

struct NotUnitTrace : Error {
  using Error::Error;
};

struct LevelMismatch : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

struct MultiBlockUnsupported : Error {
  using Error::Error;
};

struct NotFidelityPreserving : Error {
  using Error::Error;
};

struct NotUnitaryImplementable : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace fidlab
