#pragma once

#include <stdexcept>
#include <string>

namespace actq {

// Base class for every error raised by the library. The CLI maps
// ComputationError to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Precondition on a scalar / configuration argument violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested Hadamard size has no construction plan.
class UnsupportedSize : public Error {
 public:
  using Error::Error;
};

// Statistic is undefined for the given input (e.g. zero variance).
class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

// A numeric validation failed at run time (e.g. a rotation that is not
// orthogonal, a corrupted base Hadamard table).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace actq
