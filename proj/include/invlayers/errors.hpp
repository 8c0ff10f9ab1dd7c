#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invlayers {

// Bad input: wrong shapes, malformed descriptors, precondition violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured enumeration budget or cap would be exceeded. Never silently
// truncated.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized artifact. `line` is 1-based, 0 when unknown; for
// byte-oriented formats (graph6) `line` carries the byte offset instead.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace invlayers
