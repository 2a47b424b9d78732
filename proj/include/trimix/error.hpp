#pragma once

#include <stdexcept>
#include <string>

namespace trimix {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes that do not compose.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or degenerate numeric input.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files, I/O failures, corrupt checkpoints.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace trimix
