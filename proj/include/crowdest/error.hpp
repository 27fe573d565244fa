#pragma once

#include <stdexcept>
#include <string>

namespace crowdest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (CSV row, JSON field).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (empty stream, c > n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised by normalize_answer when nothing remains after cleaning.
class BlankAnswer : public DomainError {
 public:
  BlankAnswer() : DomainError("blank answer") {}
};

}  // namespace crowdest
