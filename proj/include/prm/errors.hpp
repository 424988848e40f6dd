#pragma once

#include <stdexcept>
#include <string>

namespace prm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model violates a structural invariant (singular generator, bad weights, ...).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public DomainError {
 public:
  explicit UnsupportedDimension(int d)
      : DomainError("operation supports d = 2 only, got d = " + std::to_string(d)) {}
};

/// Iterative solver stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Exact enumeration would exceed its word budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, double required)
      : Error(what), required_(required) {}
  double required() const { return required_; }

 private:
  double required_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace prm
