#pragma once

#include <stdexcept>
#include <string>

namespace s3bo {

/// Malformed arguments: dimension mismatch, non-finite values, invalid ranges.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or optimization failed after all recovery attempts.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scheduler misuse such as completing an unknown or already finished job.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid or unknown configuration keys and values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace s3bo
