#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nflab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or out-of-range argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed the configured cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nflab
