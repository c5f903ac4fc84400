#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nldd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an interface contract (shape mismatch, missing forward cache).
class ContractError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// Integration blew up; carries the internal step that was in use.
class InstabilityError : public NumericError {
 public:
  InstabilityError(const std::string& what, double dt) : NumericError(what), dt_(dt) {}
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
};

/// Training produced a non-finite loss.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::size_t epoch, std::string tag)
      : NumericError(what), epoch_(epoch), tag_(std::move(tag)) {}
  std::size_t epoch() const noexcept { return epoch_; }
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::size_t epoch_;
  std::string tag_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public IoError {
 public:
  using IoError::IoError;
};

class VersionError : public IoError {
 public:
  using IoError::IoError;
};

class TruncationError : public IoError {
 public:
  using IoError::IoError;
};

class ChecksumError : public IoError {
 public:
  using IoError::IoError;
};

/// Malformed delimited text; row is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row) : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace nldd
