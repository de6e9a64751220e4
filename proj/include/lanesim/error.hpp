#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lanesim {

// Bad argument shapes, wrong pixel formats, out-of-bounds regions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration values (threshold ordering, ROI overlap, gains).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PointAtInfinity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A classifier failed; never reported as a silent "None" prediction.
class InferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lanesim
