#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace ace {

// Error vocabulary shared by every layer. Parse-style failures travel as
// values (Result<T>); contract violations throw UsageError.
enum class ErrorCode {
  Usage,
  Parse,
  RangeInvalid,
  CountMismatch,
  DegenerateTarget,
  BackendUnavailable,
  RequestRejected,
  Protocol,
  Quarantined,
  Io,
};

const char* error_code_name(ErrorCode code);

struct Error {
  ErrorCode code = ErrorCode::Usage;
  std::string message;
  int http_status = 0;  // last upstream status, when relevant

  std::string to_string() const {
    return std::string(error_code_name(code)) + ": " + message;
  }
};

// Minimal value-or-error carrier. Access to the wrong side throws
// std::logic_error, which unit tests treat as a hard bug.
template <typename T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(Error error) : data_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Result::value on error: " + error().to_string());
    return std::get<T>(data_);
  }
  T&& value() && {
    if (!ok()) throw std::logic_error("Result::value on error: " + error().to_string());
    return std::get<T>(std::move(data_));
  }
  const Error& error() const {
    if (ok()) throw std::logic_error("Result::error on value");
    return std::get<Error>(data_);
  }

 private:
  std::variant<T, Error> data_;
};

template <typename T>
Result<T> fail(ErrorCode code, std::string message, int http_status = 0) {
  return Result<T>(Error{code, std::move(message), http_status});
}

// Thrown when a caller breaks a documented precondition.
struct UsageError : std::invalid_argument {
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown by kl_penalty when q has zero mass where p does not.
struct InfiniteKlError : std::domain_error {
  explicit InfiniteKlError(const std::string& what) : std::domain_error(what) {}
};

void log_warn(const std::string& message);
void log_info(const std::string& message);

}  // namespace ace
