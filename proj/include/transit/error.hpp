#pragma once

#include <stdexcept>
#include <string>

namespace transit {

// Every recoverable failure in the library surfaces as a TransitError with a
// machine-checkable kind. Callers that only care about success can treat it
// as a plain runtime_error.
enum class ErrorKind {
  InvalidArgument,
  UnsupportedRegion,
  MissingFile,
  MalformedSyntax,
  DuplicateId,
  DanglingReference,
  ShortSequence,
  SchemaViolation,
  BadRow,
  SelfLoop,
  DegenerateGeometry,
  UndefinedSpeed,
  DataQuality,
  IncomparableReports,
};

class TransitError : public std::runtime_error {
 public:
  TransitError(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace transit
