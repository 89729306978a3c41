#pragma once

#include <stdexcept>
#include <string>

namespace animgram {

/// Base for every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent catalog/lexicon data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Constraint evaluation failure: unresolvable operand, zero-length
/// direction, or mixed operand domains.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Sampling invoked in an order that violates feature dependencies.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace animgram
