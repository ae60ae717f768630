#pragma once

#include <stdexcept>

namespace spectral_frechet {

// Error taxonomy mirrors the CLI exit codes: 2 argument, 3 data, 4 numeric.

/// Caller violated a precondition (bad sizes, ranges, infeasible parameters).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input files or streams are malformed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure left its domain of validity.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spectral_frechet
