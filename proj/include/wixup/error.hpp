#pragma once

#include <stdexcept>
#include <string>

namespace wixup {

/// Invalid or inconsistent input data (malformed files, invariant violations).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A range falls outside the detectable window of the profile.
class OutOfRange : public DataError {
 public:
  using DataError::DataError;
};

/// Bad configuration values or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wixup
