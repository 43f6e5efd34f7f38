#pragma once

#include <stdexcept>
#include <string>

namespace isc {

// Invalid model parameters, flag values or config contents. CLI maps this
// to exit code 2.
class ParameterError : public std::runtime_error {
public:
  explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed input files, and dimension mismatches between
// files that are supposed to describe the same graph. Exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: eigensolver non-convergence, residual above tolerance,
// or a singular scaling (zero degree with no ridge). Exit code 4.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isc
