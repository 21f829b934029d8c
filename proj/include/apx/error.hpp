#pragma once

#include <stdexcept>
#include <string>

namespace apx {

/// Error categories surfaced through the C API as status codes.
enum class ErrorCode {
  Parse = 1,
  InvalidArgument,
  Io,
  Infeasible,
  Overflow,
  Unstable,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorCode::Parse, line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace apx
