#include "biphoton/evaluators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "biphoton/errors.hpp"
#include "biphoton/gaussian_integral.hpp"
#include "biphoton/quadrature.hpp"

namespace biphoton {

namespace {

RateResult to_rate(cdouble integral, Method method) {
  RateResult r;
  r.method = method;
  r.value = integral.real();
  r.imag_residue = std::abs(integral.imag());
  return r;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::GaussianEngine:
      return "engine";
    case Method::ClosedFormAsPrinted:
      return "closed-form";
    case Method::Quadrature:
      return "quadrature";
  }
  return "engine";
}

std::optional<Method> method_from_string(std::string_view text) noexcept {
  if (text == "engine") return Method::GaussianEngine;
  if (text == "closed-form") return Method::ClosedFormAsPrinted;
  if (text == "quadrature") return Method::Quadrature;
  return std::nullopt;
}

double RateResult::relative_imag_residue() const noexcept {
  return imag_residue / std::max(value, std::numeric_limits<double>::min());
}

RateResult rate_gaussian_engine(double x1, double x2, const PumpParams& pump, const CrystalParams& crystal,
                                const ChannelParams& channel, TurbulenceKernelMode mode) {
  const auto form = build_quadratic_form(x1, x2, pump, crystal, channel, mode);
  const auto integral = gaussian_integral(form);
  RateResult r = to_rate(integral.value, Method::GaussianEngine);
  r.ill_conditioned = integral.ill_conditioned;
  // A coincidence rate is a squared modulus; a negative value means the
  // assembly or the branch choice is wrong.
  if (r.value < 0.0) throw std::logic_error("Gaussian engine produced a negative rate");
  return r;
}

RateResult rate_quadrature(double x1, double x2, const PumpParams& pump, const CrystalParams& crystal,
                           const ChannelParams& channel, TurbulenceKernelMode mode, double rel_tol) {
  if (!(rel_tol >= 1e-6 && rel_tol <= 1e-2)) {
    throw DomainError("quadrature rel_tol must lie in [1e-6, 1e-2]");
  }
  const auto form = build_quadratic_form(x1, x2, pump, crystal, channel, mode);
  QuadratureOptions options;
  options.rel_tol = rel_tol;
  const auto q = integrate_quadratic_form(form, options);
  RateResult r = to_rate(q.value, Method::Quadrature);
  r.error_estimate = q.error_estimate;
  return r;
}

RateResult evaluate_rate(Method method, double x1, double x2, const PumpParams& pump,
                         const CrystalParams& crystal, const ChannelParams& channel, TurbulenceKernelMode mode,
                         double rel_tol) {
  switch (method) {
    case Method::GaussianEngine:
      return rate_gaussian_engine(x1, x2, pump, crystal, channel, mode);
    case Method::ClosedFormAsPrinted:
      return rate_closed_form_as_printed(x1, x2, pump, crystal, channel);
    case Method::Quadrature:
      return rate_quadrature(x1, x2, pump, crystal, channel, mode, rel_tol);
  }
  throw std::logic_error("unknown method");
}

}  // namespace biphoton
