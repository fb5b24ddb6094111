#pragma once

#include <stdexcept>
#include <string>

namespace seedset {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, labels, flags, preconditions).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Structural precondition on a graph failed (not decomposable, not connected, ...).
class GraphError : public InputError {
 public:
  using InputError::InputError;
};

/// A marginal covariance block is not positive definite, so the maximum
/// likelihood estimate does not exist. `where()` names the offending vertex set.
class MleError : public Error {
 public:
  MleError(const std::string& what, std::string where)
      : Error(what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace seedset
