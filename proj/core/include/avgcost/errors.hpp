#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avgcost {

/// Argument outside the mathematical domain of an operation (negative
/// demand, non-finite price, Surplus mechanism with a single user, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller supplied an ill-formed request (empty grid, mismatched lengths).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver exhausted its budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit time integration left the admissible state set.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The optimal surplus is not strictly positive, so ratios are undefined.
class DegenerateInstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document. `line()` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace avgcost
