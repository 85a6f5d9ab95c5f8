#pragma once

#include <stdexcept>
#include <string>

namespace signspot {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: precondition violations, malformed documents, invalid config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures (unreadable/unwritable paths).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Language-model endpoint failure after all attempts were spent.
class TransportError : public Error {
 public:
  TransportError(std::string endpoint, int attempts, std::string last_error)
      : Error("transport error calling " + endpoint + " after " + std::to_string(attempts) +
              " attempt(s): " + last_error),
        endpoint_(std::move(endpoint)),
        attempts_(attempts),
        last_error_(std::move(last_error)) {}

  const std::string& endpoint() const noexcept { return endpoint_; }
  int attempts() const noexcept { return attempts_; }
  /// The final underlying failure, verbatim.
  const std::string& last_error() const noexcept { return last_error_; }

 private:
  std::string endpoint_;
  int attempts_;
  std::string last_error_;
};

}  // namespace signspot
