#pragma once

#include <stdexcept>
#include <string>

namespace metastab {

// Exit codes of the command-line tool map onto these categories.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

// Invalid input, malformed files, violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

// Exhaustive enumeration requested beyond the vertex cap.
class CapacityError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

// Scans that fail to converge, singular fits, degenerate samples.
class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

}  // namespace metastab
