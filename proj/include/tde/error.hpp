#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tde {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value failed a structural invariant (norm, trace, hermiticity, PSD, unitarity).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Bad slot references, overlapping registers, malformed permutations.
class SlotError : public Error {
 public:
  using Error::Error;
};

// A gate was asked to couple slots that sit at different clock cycles.
class CycleMisalignment : public Error {
 public:
  using Error::Error;
};

// Projection onto an outcome that has zero probability.
class ZeroProbabilityOutcome : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Circuit text could not be parsed; carries the 1-based line number (0 = whole file).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace tde
