#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Invalid physical input (non-positive wavelength, negative C_n^2, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed quantity text or configuration entry.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Re(A) of a quadratic-form integrand is not positive definite.
class DegenerateIntegrandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A denominator in the closed-form constants block vanished.
class SingularConstantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The quadrature oracle hit its refinement cap before converging.
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
