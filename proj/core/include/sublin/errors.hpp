#pragma once

#include <stdexcept>
#include <string>

namespace sublin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or violated precondition (bad probabilities, off-lattice
/// points, asymmetric matrices, level mismatches, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was hit (lattice blowup, nesting depth, fdd arity).
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

/// A test function or intermediate value was not finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sublin
