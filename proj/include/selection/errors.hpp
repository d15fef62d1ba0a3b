#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selection {

// Bad user input: scenario files, expressions, invalid parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Floating-point failure during a run (overflow, NaN).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : InputError("syntax error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset),
        detail_(message) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

class EvalError : public InputError {
 public:
  EvalError(std::size_t offset, const std::string& message)
      : InputError("evaluation error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace selection
