#pragma once

#include <vector>

#include "biphoton/kernels.hpp"

namespace biphoton {

struct QuadratureOptions {
  // Refinement stops once doubling the panels on every axis changes the
  // estimate by less than rel_tol (relative).
  double rel_tol = 1e-4;
  // Half-width of the integration box per axis, in 1/e Gaussian widths.
  double box_half_width = 6.0;
  int initial_panels = 1;
  // Refinement cap per axis; exceeding it raises OracleFailure.
  int max_panels = 1024;
};

struct QuadratureResult {
  cdouble value;  // includes exp(c)
  double error_estimate = 0.0;  // relative change of the last refinement round
  std::vector<int> panels;
  long long evaluations = 0;
};

// Direct numerical integration of exp(-rho^T A rho + b^T rho + c).
//
// The box is aligned with the eigenvectors of Re(A): each axis spans
// +-box_half_width / sqrt(lambda_j) around the maximum of the real part of
// the exponent. This is an orthogonal change of variables, so no part of the
// closed-form Gaussian identity is used. Each axis carries a composite
// 20-point Gauss-Legendre rule and the integral is evaluated as nested 1D
// sums.
QuadratureResult integrate_quadratic_form(const ComplexQuadraticForm& form,
                                          const QuadratureOptions& options = {});

}  // namespace biphoton
