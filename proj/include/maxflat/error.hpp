#pragma once

#include <stdexcept>
#include <string>

namespace maxflat {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user-supplied parameter violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure cannot produce a trustworthy result
/// (singular systems, non-real results that should be real, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxflat
