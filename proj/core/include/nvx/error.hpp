// Error taxonomy; categories map one-to-one onto CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace nvx {

enum class ErrorCategory { parse = 2, validation = 3, numeric = 4, io = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& msg)
      : std::runtime_error(msg), category_(category) {}

  ErrorCategory category() const { return category_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

namespace detail {
inline std::string at_position(const std::string& msg, int line, int column,
                               const std::string& source) {
  std::string where = source;
  if (line > 0) {
    if (!where.empty()) where += ": ";
    where += "line " + std::to_string(line) + ", column " +
             std::to_string(column);
  }
  return where.empty() ? msg : where + ": " + msg;
}
}  // namespace detail

// Malformed input text (config grammar, CSV).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, int line = 0, int column = 0,
                      const std::string& source = "")
      : Error(ErrorCategory::parse,
              detail::at_position(msg, line, column, source)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Well-formed input with out-of-domain values.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg, int line = 0,
                           int column = 0, const std::string& source = "")
      : Error(ErrorCategory::validation,
              detail::at_position(msg, line, column, source)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg)
      : Error(ErrorCategory::numeric, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorCategory::io, msg) {}
};

}  // namespace nvx
