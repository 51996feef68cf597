#ifndef QDLIE_ERROR_HPP
#define QDLIE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qdlie {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input data (non-square matrix, NaN, v = 0, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A mathematical hypothesis required by an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// iso_invariant() was called on a matrix that is not semisimple or has a
/// nonzero purely imaginary eigenvalue.
class NotInEnd0 : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// The input is valid but outside what the classifier can decide (e.g. a
/// non-solvable Lie algebra).
class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double threshold)
      : Error(what), threshold_(threshold) {}
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

}  // namespace qdlie

#endif  // QDLIE_ERROR_HPP
