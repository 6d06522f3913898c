#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trafficlens {

enum class ErrorKind {
  kInvalidArgument,
  kMalformedRecord,
  kNonMonotoneTimestamps,
  kEmptyFeed,
  kEmptyPriorText,
  kEmptyText,
  kBudgetInvalid,
  kBackendUnreachable,
  kBackendError,
  kMissingBaseCamera,
  kMissingBaseSegment,
  kEmptyDocument,
  kEmptyIndex,
  kEmptyList,
  kNoPairs,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the engine; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised for malformed manifest lines; carries the 1-based line number.
class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& detail)
      : Error(ErrorKind::kMalformedRecord,
              "malformed record at line " + std::to_string(line) + ": " + detail),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Non-2xx reply from an HTTP model backend.
class BackendError : public Error {
 public:
  BackendError(int status, std::string body)
      : Error(ErrorKind::kBackendError,
              "backend returned HTTP " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

}  // namespace trafficlens
