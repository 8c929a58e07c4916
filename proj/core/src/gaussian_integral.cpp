#include "biphoton/gaussian_integral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "biphoton/errors.hpp"

namespace biphoton {

GaussianIntegral gaussian_integral(const ComplexQuadraticForm& form) {
  const Eigen::Index n = form.dim();
  if (form.asymmetry() > 1e-12) {
    throw DomainError("quadratic form matrix is not symmetric");
  }

  const Eigen::MatrixXd re = form.matrix.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (re + re.transpose()), Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (!(lambda_min > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate integrand: Re(A) has eigenvalue " << lambda_min;
    throw DegenerateIntegrandError(msg.str());
  }

  // A = L D L^T, L unit lower triangular, no conjugation.
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXcd d(n);
  const auto& a = form.matrix;
  for (Eigen::Index j = 0; j < n; ++j) {
    cdouble djj = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) djj -= l(j, k) * l(j, k) * d(k);
    if (!(djj.real() > 0.0)) {
      throw DegenerateIntegrandError("LDL^T pivot with non-positive real part");
    }
    d(j) = djj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cdouble lij = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) lij -= l(i, k) * l(j, k) * d(k);
      l(i, j) = lij / djj;
    }
  }

  cdouble half_log_det{0.0, 0.0};
  for (Eigen::Index j = 0; j < n; ++j) half_log_det += 0.5 * std::log(d(j));

  // y = A^-1 b via L w = b, D v = w, L^T y = v.
  Eigen::VectorXcd y = form.vector;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < i; ++k) y(i) -= l(i, k) * y(k);
  }
  for (Eigen::Index i = 0; i < n; ++i) y(i) /= d(i);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    for (Eigen::Index k = i + 1; k < n; ++k) y(i) -= l(k, i) * y(k);
  }
  const cdouble quadratic = (form.vector.transpose() * y)(0, 0);

  GaussianIntegral out;
  out.log_value = form.scalar + 0.5 * static_cast<double>(n) * std::log(std::numbers::pi) -
                  half_log_det + 0.25 * quadratic;
  out.value = std::exp(out.log_value);
  out.condition_number = lambda_max / lambda_min;
  out.ill_conditioned = out.condition_number > kIllConditionedThreshold;
  return out;
}

}  // namespace biphoton
