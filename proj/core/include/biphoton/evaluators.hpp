#pragma once

#include <optional>
#include <string_view>

#include "biphoton/kernels.hpp"

namespace biphoton {

enum class Method { GaussianEngine, ClosedFormAsPrinted, Quadrature };

std::string_view to_string(Method method) noexcept;
// Accepts the CLI spellings engine | closed-form | quadrature.
std::optional<Method> method_from_string(std::string_view text) noexcept;

struct RateResult {
  double value = 0.0;         // coincidence rate, arbitrary units
  double imag_residue = 0.0;  // |Im| of the discarded imaginary part
  Method method = Method::GaussianEngine;
  bool ill_conditioned = false;
  double error_estimate = 0.0;  // quadrature only

  double relative_imag_residue() const noexcept;
};

// Bound on imag_residue / max(value, tiny) for the Gaussian engine.
inline constexpr double kImagResidueBound = 1e-8;

// Coincidence rate R(x1, x2) by assembling the integrand as a quadratic
// form and applying the closed-form Gaussian integral.
RateResult rate_gaussian_engine(double x1, double x2, const PumpParams& pump, const CrystalParams& crystal,
                                const ChannelParams& channel,
                                TurbulenceKernelMode mode = TurbulenceKernelMode::CrossTerm);

// Same integrand integrated numerically; rel_tol must lie in [1e-6, 1e-2].
RateResult rate_quadrature(double x1, double x2, const PumpParams& pump, const CrystalParams& crystal,
                           const ChannelParams& channel, TurbulenceKernelMode mode, double rel_tol);

struct ClosedFormConstants {
  cdouble A, A1, A2, A3, A4, A5, A6;
  cdouble M1, M2, M3, M4, M5;
};

// The reference constants block, symbol for symbol. k is taken as k_p and
// the standalone alpha in A6 and M5 as the signal lateral coherence length,
// so a turbulence-free channel is singular here. Throws
// SingularConstantError when M1, M3, M4 or M5 vanish or blow up.
ClosedFormConstants closed_form_constants(const PumpParams& pump, const CrystalParams& crystal,
                                          const ChannelParams& channel);

// |R(x1, x2)| from the reference three-factor closed form, exactly as
// printed. Diagnostic only: compare against the engine, never assert on it.
RateResult rate_closed_form_as_printed(double x1, double x2, const PumpParams& pump,
                                       const CrystalParams& crystal, const ChannelParams& channel);

// Dispatches on method. rel_tol is used by Quadrature only.
RateResult evaluate_rate(Method method, double x1, double x2, const PumpParams& pump,
                         const CrystalParams& crystal, const ChannelParams& channel,
                         TurbulenceKernelMode mode = TurbulenceKernelMode::CrossTerm, double rel_tol = 1e-4);

}  // namespace biphoton
