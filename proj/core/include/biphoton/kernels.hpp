#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

#include "biphoton/units.hpp"

namespace biphoton {

using cdouble = std::complex<double>;

// Integrand exp(-rho^T A rho + b^T rho + c) over R^n. A is complex
// symmetric (not Hermitian); Re(A) must be positive definite for the
// integral to converge absolutely.
struct ComplexQuadraticForm {
  enum Contribution : std::uint32_t {
    kPumpEnvelope = 1u << 0,
    kPumpCoherence = 1u << 1,
    kTurbulence = 1u << 2,
    kPhaseMatching = 1u << 3,
    kPropagation = 1u << 4,
  };

  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd vector;
  cdouble scalar{0.0, 0.0};
  // Bitmask of the physical factors that were folded into the form.
  std::uint32_t contributions = 0;

  explicit ComplexQuadraticForm(Eigen::Index n)
      : matrix(Eigen::MatrixXcd::Zero(n, n)), vector(Eigen::VectorXcd::Zero(n)) {}

  Eigen::Index dim() const noexcept { return matrix.rows(); }
  bool has(Contribution c) const noexcept { return (contributions & c) != 0; }

  // Value of the exponent -rho^T A rho + b^T rho + c at a real point.
  cdouble exponent(const Eigen::VectorXd& rho) const;
  // Max |A - A^T| relative to max |A|.
  double asymmetry() const;
};

enum class TurbulenceKernelMode { CrossTerm, AsPrinted };

std::string_view to_string(TurbulenceKernelMode mode) noexcept;

// Gaussian Schell-model cross-spectral density <V*(x') V(x)>.
double gaussian_schell_correlation(double x, double x_prime, const PumpParams& pump);

// Ensemble-averaged turbulence phase factor with detector-side separation u
// and source-side separation v. CrossTerm: exp(-(u^2 + u v + v^2)/alpha^2).
// AsPrinted keeps the dimensionally inconsistent linear u term for diagnostics.
double turbulence_kernel(double u, double v, const CoherenceLength& alpha, TurbulenceKernelMode mode);

// Deterministic part of the Fresnel impulse response from x_src to x_det.
cdouble impulse_function(double x_det, double x_src, double k, double z);

// Gaussian surrogate for the phase-matching function,
// exp(-k_p u^2 / (4 L (gamma + i))).
cdouble phase_matching_surrogate(double u, const PumpParams& pump, const CrystalParams& crystal);

// 4 pi k_p / (L sqrt(gamma^2 + 1)): normalisation carried with the surrogate.
double phase_matching_normalization(const PumpParams& pump, const CrystalParams& crystal);

// Assembles the four-fold coincidence integrand over
// (rho_s, rho_i, rho'_s, rho'_i) into a quadratic form. The matrix depends
// only on pump/crystal/channel; the detector positions enter b and c.
// Throws DegenerateIntegrandError if Re(A) is not positive definite.
ComplexQuadraticForm build_quadratic_form(double x1, double x2, const PumpParams& pump,
                                          const CrystalParams& crystal, const ChannelParams& channel,
                                          TurbulenceKernelMode mode = TurbulenceKernelMode::CrossTerm);

// Smallest eigenvalue of Re(A); <= 0 means the integrand does not decay.
double min_real_eigenvalue(const ComplexQuadraticForm& form);

}  // namespace biphoton
