#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace factest {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (range, size, ordering) does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed: non-finite entries, mismatched shapes,
/// unparseable cells, zero-variance columns under standardization.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The input is well formed but the test is vacuous on it, e.g. the
/// residualized outcome is orthogonal to every residualized regressor.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// The columns of (factors, extra regressors) are numerically dependent.
class CollinearityError : public Error {
 public:
  CollinearityError(const std::string& what, std::vector<std::string> columns)
      : Error(what), columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

/// A covariance matrix could not be factorized (not symmetric positive definite).
class FactorizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace factest
