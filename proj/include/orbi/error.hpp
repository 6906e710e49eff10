#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text; offset is a byte position into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Numeric evaluation left the function's domain (division by zero, sqrt of a
// negative, non-finite result).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input (bad ids, mismatched sizes, failed preconditions).
class InputError : public Error {
 public:
  using Error::Error;
};

// An internal consistency certificate failed; never expected on valid input.
class CertificateError : public Error {
 public:
  using Error::Error;
};

}  // namespace orbi
