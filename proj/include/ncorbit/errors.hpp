#pragma once

#include <stdexcept>
#include <string>

namespace ncorbit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a documented precondition. `field()` names the
// offending key/parameter; the CLI maps this class to exit code 2.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed key-value input; carries the source and line number.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, int line, std::string key,
             const std::string& message)
      : ValidationError(std::move(key), message + location(source, line)), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  static std::string location(const std::string& source, int line) {
    if (source.empty()) return "";
    return " (" + source + (line > 0 ? ":" + std::to_string(line) : "") + ")";
  }

  int line_;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class DegenerateOrbitError : public Error {
 public:
  using Error::Error;
};

class StepCollapseError : public Error {
 public:
  using Error::Error;
};

class TooFewPassagesError : public Error {
 public:
  using Error::Error;
};

class AmbiguousMinimumError : public Error {
 public:
  using Error::Error;
};

class InconsistentScalingError : public Error {
 public:
  using Error::Error;
};

class PerturbativeRegimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncorbit
