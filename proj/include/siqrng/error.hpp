#pragma once

#include <stdexcept>
#include <string>

namespace siqrng {

// Root of the library's exception hierarchy. Everything thrown on purpose by
// siqrng derives from this, so callers can separate our failures from
// std::bad_alloc and friends.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shot-noise calibration is unusable (shot variance not above dark variance).
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// An estimator was handed no data (n = 0).
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce an admissible answer.
class EstimatorError : public Error {
 public:
  using Error::Error;
};

/// Leading-order approximation requested outside its validity range.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Matrix/vector sizes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value does not fit the requested fixed-width encoding.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration key or value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace siqrng
