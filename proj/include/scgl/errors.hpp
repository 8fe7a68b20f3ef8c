#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scgl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: out-of-range index, negative weight, size mismatch.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A value left the domain of a function (e.g. a non-positive eigenvalue in a log).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent hyperparameters or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (non-PSD covariance, unparsable file, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The kernel of a connection Laplacian is too small to recover node bases.
class SynchronizationError : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation requires a connected graph.
class DisconnectedGraphError : public Error {
 public:
  DisconnectedGraphError(const std::string& what, std::vector<std::vector<long>> components)
      : Error(what), components_(std::move(components)) {}

  const std::vector<std::vector<long>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<long>> components_;
};

}  // namespace scgl
