#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "biphoton/errors.hpp"
#include "biphoton/gaussian_integral.hpp"

namespace biphoton {
namespace {

constexpr double kPi = std::numbers::pi;

ComplexQuadraticForm scalar_form(cdouble a, cdouble b = 0.0, cdouble c = 0.0) {
  ComplexQuadraticForm f(1);
  f.matrix(0, 0) = a;
  f.vector(0) = b;
  f.scalar = c;
  return f;
}

TEST(GaussianIntegral, ReferenceIdentities) {
  EXPECT_NEAR(gaussian_integral(scalar_form(1.0)).value.real(), std::sqrt(kPi), 1e-12 * std::sqrt(kPi));
  EXPECT_NEAR(gaussian_integral(scalar_form(1.0, 2.0)).value.real(), std::sqrt(kPi) * std::exp(1.0),
              1e-12 * std::sqrt(kPi) * std::exp(1.0));
  ComplexQuadraticForm f(2);
  f.matrix(0, 0) = 1.0;
  f.matrix(1, 1) = 2.0;
  EXPECT_NEAR(gaussian_integral(f).value.real(), kPi / std::sqrt(2.0), 1e-12 * kPi);
}

TEST(GaussianIntegral, RealOneDimensional) {
  EXPECT_NEAR(gaussian_integral(scalar_form(1.0)).value.real(), std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(gaussian_integral(scalar_form(2.5)).value.real(), std::sqrt(kPi / 2.5), 1e-15);
}

TEST(GaussianIntegral, ComplexCoefficientPrincipalRoot) {
  const cdouble a(1.0, 3.0);
  const auto r = gaussian_integral(scalar_form(a));
  EXPECT_NEAR(std::abs(r.value - std::sqrt(kPi / a)), 0.0, 1e-15);
}

TEST(GaussianIntegral, LinearAndScalarTerms) {
  const cdouble a(2.0, -1.0), b(0.3, 0.7), c(-0.2, 0.1);
  const auto r = gaussian_integral(scalar_form(a, b, c));
  const cdouble expected = std::exp(c) * std::sqrt(kPi / a) * std::exp(b * b / (4.0 * a));
  EXPECT_NEAR(std::abs(r.value - expected), 0.0, 1e-14);
}

TEST(GaussianIntegral, SeparableProductMatchesFactors) {
  ComplexQuadraticForm f(3);
  const cdouble a[3] = {{1.0, 0.5}, {3.0, -2.0}, {0.4, 0.0}};
  const cdouble b[3] = {{0.1, 0.0}, {0.0, -0.6}, {0.2, 0.2}};
  cdouble expected = 1.0;
  for (int i = 0; i < 3; ++i) {
    f.matrix(i, i) = a[i];
    f.vector(i) = b[i];
    expected *= std::sqrt(kPi / a[i]) * std::exp(b[i] * b[i] / (4.0 * a[i]));
  }
  EXPECT_NEAR(std::abs(gaussian_integral(f).value - expected), 0.0, 1e-13 * std::abs(expected));
}

TEST(GaussianIntegral, BranchContinuityAlongImaginarySweep) {
  // A = (1 + i t) I_4: the exact value is pi^2 / (1 + i t)^2, whose phase
  // passes through +-pi, where a principal root of det(A) would flip sign.
  for (int k = -400; k <= 400; ++k) {
    const double t = 0.25 * k;
    ComplexQuadraticForm f(4);
    f.matrix = cdouble(1.0, t) * Eigen::MatrixXcd::Identity(4, 4);
    const cdouble expected = kPi * kPi / ((1.0 + cdouble(0, t)) * (1.0 + cdouble(0, t)));
    EXPECT_NEAR(std::abs(gaussian_integral(f).value - expected), 0.0, 1e-12 * std::abs(expected)) << t;
  }
}

TEST(GaussianIntegral, LogValueSurvivesUnderflow) {
  const auto r = gaussian_integral(scalar_form(1.0, 0.0, -2000.0));
  EXPECT_EQ(r.value, cdouble(0.0, 0.0));
  EXPECT_NEAR(r.log_value.real(), -2000.0 + 0.5 * std::log(kPi), 1e-12);
}

TEST(GaussianIntegral, ConditioningReported) {
  ComplexQuadraticForm f(2);
  f.matrix(0, 0) = 1.0;
  f.matrix(1, 1) = 1e-13;
  const auto r = gaussian_integral(f);
  EXPECT_NEAR(r.condition_number, 1e13, 1e3);
  EXPECT_TRUE(r.ill_conditioned);
  f.matrix(1, 1) = 4.0;
  EXPECT_FALSE(gaussian_integral(f).ill_conditioned);
}

TEST(GaussianIntegral, Errors) {
  ComplexQuadraticForm f(2);
  f.matrix << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(gaussian_integral(f), DomainError);
  f.matrix << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(gaussian_integral(f), DegenerateIntegrandError);
  EXPECT_THROW(gaussian_integral(scalar_form(cdouble(0.0, 1.0))), DegenerateIntegrandError);
}

}  // namespace
}  // namespace biphoton
