#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace delta_scope {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when vector or dataset dimensions disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed libsvm input. `line()` is 1-based; 0 means "whole input".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  /// Same error with `context` (e.g. a file name) prefixed to the message.
  ParseError(const std::string& context, const ParseError& inner)
      : Error(context + ": " + inner.what()), line_(inner.line_) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace delta_scope
