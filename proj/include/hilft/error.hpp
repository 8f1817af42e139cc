#pragma once

#include <stdexcept>
#include <string>

namespace hilft {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise corrupt values.
class DataIntegrityError : public Error {
 public:
  using Error::Error;
};

// Write aimed at a step that is already sealed.
class OutOfOrderError : public Error {
 public:
  using Error::Error;
};

class UnknownKeyError : public Error {
 public:
  using Error::Error;
};

class NotAvailableError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (CSV or weather); `row` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : Error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Scenario schema or cross-field violation. `path` is the dotted key path.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class NoResponseError : public InsufficientDataError {
 public:
  using InsufficientDataError::InsufficientDataError;
};

class ProtocolViolationError : public InsufficientDataError {
 public:
  using InsufficientDataError::InsufficientDataError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BusyError : public Error {
 public:
  using Error::Error;
};

// Realtime overrun with the abort policy selected.
class OverrunAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace hilft
