#pragma once

#include "biphoton/kernels.hpp"

namespace biphoton {

struct GaussianIntegral {
  cdouble value;
  // log(value) on the continuous branch; usable when value under/overflows.
  cdouble log_value;
  // lambda_max / lambda_min of Re(A).
  double condition_number = 1.0;
  bool ill_conditioned = false;
};

inline constexpr double kIllConditionedThreshold = 1e12;

// Closed-form evaluation of  integral exp(-rho^T A rho + b^T rho + c) d^n rho
//   = exp(c) pi^(n/2) det(A)^(-1/2) exp(b^T A^-1 b / 4).
//
// det(A)^(1/2) is taken as the product of principal square roots of the
// pivots of an unpivoted LDL^T factorisation. For Re(A) positive definite
// every pivot (a Schur complement diagonal) has positive real part, so each
// square root stays on one sheet and the result is continuous in the
// parameters of A.
//
// Throws DegenerateIntegrandError when Re(A) is not positive definite and
// DomainError when A is not symmetric to 1e-12 relative.
GaussianIntegral gaussian_integral(const ComplexQuadraticForm& form);

}  // namespace biphoton
