#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shotnoise {

// A caller-supplied value violates an operation's preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request is well-formed but the quantity does not exist for these
// parameters (e.g. a stationary regime with zero decay).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input text. line() is 1-based; 0 means "no particular line".
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace shotnoise
