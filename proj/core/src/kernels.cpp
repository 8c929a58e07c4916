#include "biphoton/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr cdouble kI{0.0, 1.0};

// Adds coef * (u . rho)^2 to rho^T A rho.
void add_rank_one(Eigen::MatrixXcd& a, const Eigen::Vector4d& u, cdouble coef) {
  a += coef * (u * u.transpose()).cast<cdouble>();
}

}  // namespace

cdouble ComplexQuadraticForm::exponent(const Eigen::VectorXd& rho) const {
  const Eigen::VectorXcd r = rho.cast<cdouble>();
  return -(r.transpose() * matrix * r)(0, 0) + (vector.transpose() * r)(0, 0) + scalar;
}

double ComplexQuadraticForm::asymmetry() const {
  const double scale = matrix.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() / scale;
}

std::string_view to_string(TurbulenceKernelMode mode) noexcept {
  return mode == TurbulenceKernelMode::CrossTerm ? "cross-term" : "as-printed";
}

double gaussian_schell_correlation(double x, double x_prime, const PumpParams& pump) {
  const double envelope = std::exp(-(x * x + x_prime * x_prime) / (4.0 * pump.sigma * pump.sigma));
  if (pump.delta.is_infinite()) return pump.amplitude * envelope;
  const double d = x_prime - x;
  return pump.amplitude * envelope * std::exp(-d * d * pump.delta.inverse_square() / 2.0);
}

double turbulence_kernel(double u, double v, const CoherenceLength& alpha, TurbulenceKernelMode mode) {
  if (alpha.is_infinite()) return 1.0;
  const double middle = mode == TurbulenceKernelMode::CrossTerm ? u * v : u;
  return std::exp(-(u * u + middle + v * v) * alpha.inverse_square());
}

cdouble impulse_function(double x_det, double x_src, double k, double z) {
  const cdouble amplitude = std::sqrt(-kI * k / (2.0 * std::numbers::pi * z));
  const double d = x_det - x_src;
  return amplitude * std::exp(-kI * (k / (2.0 * z)) * d * d);
}

cdouble phase_matching_surrogate(double u, const PumpParams& pump, const CrystalParams& crystal) {
  const double kp = wavevector(pump.wavelength);
  return std::exp(-kp * u * u / (4.0 * crystal.length * (crystal.gamma + kI)));
}

double phase_matching_normalization(const PumpParams& pump, const CrystalParams& crystal) {
  const double kp = wavevector(pump.wavelength);
  return 4.0 * std::numbers::pi * kp / (crystal.length * std::hypot(crystal.gamma, 1.0));
}

double min_real_eigenvalue(const ComplexQuadraticForm& form) {
  const Eigen::MatrixXd re = form.matrix.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (re + re.transpose()),
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

ComplexQuadraticForm build_quadratic_form(double x1, double x2, const PumpParams& pump,
                                          const CrystalParams& crystal, const ChannelParams& channel,
                                          TurbulenceKernelMode mode) {
  pump.validate();
  crystal.validate();
  channel.validate();

  const double kp = wavevector(pump.wavelength);
  const double ks = wavevector(crystal.signal_wavelength(pump));
  const double ki = wavevector(crystal.idler_wavelength(pump));
  const double z = channel.z;

  // Coordinates: rho = (rho_s, rho_i, rho'_s, rho'_i).
  const Eigen::Vector4d sum(1, 1, 0, 0);
  const Eigen::Vector4d sum_primed(0, 0, 1, 1);
  const Eigen::Vector4d sum_shift(1, 1, -1, -1);
  const Eigen::Vector4d diff(1, -1, 0, 0);
  const Eigen::Vector4d diff_primed(0, 0, 1, -1);
  const Eigen::Vector4d signal_shift(1, 0, -1, 0);
  const Eigen::Vector4d idler_shift(0, 1, 0, -1);

  ComplexQuadraticForm form(4);
  auto& a = form.matrix;

  // Pump: Gaussian Schell model at the midpoints x0 = (rho_s+rho_i)/2,
  // x = (rho'_s+rho'_i)/2.
  const double envelope = 1.0 / (16.0 * pump.sigma * pump.sigma);
  add_rank_one(a, sum, envelope);
  add_rank_one(a, sum_primed, envelope);
  form.contributions |= ComplexQuadraticForm::kPumpEnvelope;
  if (!pump.delta.is_infinite()) {
    add_rank_one(a, sum_shift, pump.delta.inverse_square() / 8.0);
    form.contributions |= ComplexQuadraticForm::kPumpCoherence;
  }

  // Phase matching Lambda(rho_s - rho_i) Lambda*(rho'_s - rho'_i).
  const cdouble pm = kp / (4.0 * crystal.length * (crystal.gamma + kI));
  add_rank_one(a, diff, pm);
  add_rank_one(a, diff_primed, std::conj(pm));
  form.contributions |= ComplexQuadraticForm::kPhaseMatching;

  // Turbulence: h_j and h_j* share a detector, so the detector-side
  // separation u is zero and both kernel modes reduce to exp(-v^2/alpha^2).
  (void)mode;
  const CoherenceLength alpha_s = lateral_coherence_length(channel.cn2, ks, z);
  const CoherenceLength alpha_i = lateral_coherence_length(channel.cn2, ki, z);
  if (!alpha_s.is_infinite()) {
    add_rank_one(a, signal_shift, alpha_s.inverse_square());
    form.contributions |= ComplexQuadraticForm::kTurbulence;
  }
  if (!alpha_i.is_infinite()) {
    add_rank_one(a, idler_shift, alpha_i.inverse_square());
    form.contributions |= ComplexQuadraticForm::kTurbulence;
  }

  // Propagation h_s(x1,rho_s) h_i(x2,rho_i) h_s*(x1,rho'_s) h_i*(x2,rho'_i).
  // The x^2 detector terms cancel between each h and its conjugate.
  const cdouble phase_s = kI * ks / (2.0 * z);
  const cdouble phase_i = kI * ki / (2.0 * z);
  a(0, 0) += phase_s;
  a(1, 1) += phase_i;
  a(2, 2) -= phase_s;
  a(3, 3) -= phase_i;
  form.vector(0) = 2.0 * phase_s * x1;
  form.vector(1) = 2.0 * phase_i * x2;
  form.vector(2) = -2.0 * phase_s * x1;
  form.vector(3) = -2.0 * phase_i * x2;
  form.contributions |= ComplexQuadraticForm::kPropagation;

  const double impulse_magnitude = ks * ki / std::pow(2.0 * std::numbers::pi * z, 2);
  form.scalar = std::log(pump.amplitude) + std::log(phase_matching_normalization(pump, crystal)) +
                std::log(impulse_magnitude);

  const double lambda_min = min_real_eigenvalue(form);
  if (!(lambda_min > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate integrand: Re(A) not positive definite (min eigenvalue " << lambda_min
        << ") for sigma=" << pump.sigma << " m, L=" << crystal.length << " m, gamma=" << crystal.gamma
        << ", cn2=" << channel.cn2 << ", z=" << z << " m";
    throw DegenerateIntegrandError(msg.str());
  }
  return form;
}

}  // namespace biphoton
