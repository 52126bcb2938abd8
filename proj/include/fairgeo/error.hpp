#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairgeo {

/// Error classes. Each maps to one stable process exit code in the CLI.
enum class ErrorKind {
  Parse,              // exit 2
  Validation,         // exit 3
  InfeasibleEpsilon,  // exit 4
  Numerical,          // exit 5
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// A distribution has zero mass where a positive value is required.
class SupportError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Marginals supplied together do not agree with each other.
class ConsistencyError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An operation was called outside the parameter regime it is defined on.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A perturbation of size eps pushed a probability below zero.
/// A (near-)singular matrix where an invertible one is required. Raised from input
/// data, so it is a validation failure.
class ConditioningError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InfeasibleEpsilonError : public Error {
 public:
  InfeasibleEpsilonError(std::string conditional, std::size_t index, double value);

  const std::string& conditional() const noexcept { return conditional_; }
  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::string conditional_;
  std::size_t index_;
  double value_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

int exit_code(ErrorKind kind) noexcept;

// Non-fatal diagnostics (threshold warnings and the like). Default sink writes to stderr.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace fairgeo
