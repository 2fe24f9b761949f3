#pragma once

#include <stdexcept>
#include <string>

namespace robscatter {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation
/// (negative distance, probability outside (0,1), n <= p, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be used: non-finite entries, too few rows.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Cholesky failed on a matrix that must be SPD.
class SingularScatterError : public Error {
 public:
  SingularScatterError(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// Determinant nonpositive or non-finite when extracting shape and size.
class DegenerateScatterError : public Error {
 public:
  using Error::Error;
};

/// The M-scale equation has no solution (too many zero distances).
class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

/// A root finder or iteration did not produce a usable answer.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A robust start (MVE / KSD) could not be formed.
class StartFailureError : public Error {
 public:
  using Error::Error;
};

/// Estimation-level failure (all weights zero, unusable tuning, ...).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// No tuning constant reaches the requested efficiency for this (p, n).
class TunabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace robscatter
