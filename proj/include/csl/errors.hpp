#pragma once

#include <stdexcept>
#include <string>

namespace csl {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorCategory { Config, Domain, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::Domain, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

/// Thrown when a Gaussian integral is requested along a non-integrable direction.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double offending_eigenvalue)
      : NumericalError(what), eigenvalue_(offending_eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Adaptive quadrature ran out of subdivisions; carries what it had reached.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : NumericalError(what), estimate_(estimate), error_(error) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace csl
