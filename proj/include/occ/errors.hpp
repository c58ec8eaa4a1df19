#pragma once

#include <stdexcept>
#include <string>

namespace occ {

/// Bad arguments, malformed spec strings or config files. CLI exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that violates a schema or a precondition. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver non-convergence, non-finite values, eigensolver failure. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace occ
