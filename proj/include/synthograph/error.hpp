#pragma once

#include <stdexcept>
#include <string>

namespace synthograph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. `line` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error(describe(line, field, what)), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string describe(std::size_t line, const std::string& field, const std::string& what) {
    std::string msg = "parse error";
    if (line > 0) msg += " at line " + std::to_string(line);
    if (!field.empty()) msg += " (field '" + field + "')";
    return msg + ": " + what;
  }

  std::size_t line_;
  std::string field_;
};

/// A structurally well-formed record that violates a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Corrupt, truncated or mismatched model file.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace synthograph
