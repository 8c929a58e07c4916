// Symbol-for-symbol transcription of the reference closed form, typos
// included. Kept only as a diagnostic against the engine.

#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/evaluators.hpp"

namespace biphoton {

namespace {

constexpr cdouble kI{0.0, 1.0};

void require_regular(cdouble value, const char* name) {
  if (!(std::isfinite(value.real()) && std::isfinite(value.imag())) || std::abs(value) == 0.0) {
    throw SingularConstantError(std::string("closed-form constant ") + name + " is singular");
  }
}

}  // namespace

ClosedFormConstants closed_form_constants(const PumpParams& pump, const CrystalParams& crystal,
                                          const ChannelParams& channel) {
  pump.validate();
  crystal.validate();
  channel.validate();

  const double k = wavevector(pump.wavelength);
  const double L = crystal.length;
  const double g = crystal.gamma;
  const double z = channel.z;
  const double s2 = pump.sigma * pump.sigma;
  const double inv_d2 = pump.delta.inverse_square();  // 0 when fully coherent

  const CoherenceLength alpha_len = lateral_coherence_length(channel.cn2, wavevector(crystal.signal_wavelength(pump)), z);
  if (alpha_len.is_infinite()) {
    throw SingularConstantError("closed form needs a finite alpha (A6 and M5 contain alpha itself)");
  }
  const double alpha = alpha_len.meters();
  const double inv_a2 = alpha_len.inverse_square();

  ClosedFormConstants c;
  c.A = 4.0 * std::numbers::pi * k / (L * std::sqrt(g * g + 1.0)) * std::pow(k / (4.0 * std::numbers::pi * z), 2);
  c.A1 = -k / (4.0 * L * (kI + g)) + inv_d2 / 8.0 + 1.0 / (16.0 * s2);
  c.A2 = -k / (4.0 * L * (-kI + g)) + inv_d2 / 8.0 + 1.0 / (16.0 * s2);
  c.A3 = inv_d2 / 4.0 + 2.0 * inv_a2;
  c.M1 = -kI * k / (4.0 * z) + k / (4.0 * L * (-kI + g)) + c.A3 / 2.0 + 1.0 / (16.0 * s2);
  require_regular(c.M1, "M1");
  c.M2 = kI * k / (4.0 * z) + k / (4.0 * L * (kI + g)) + c.A3 / 2.0 + 1.0 / (16.0 * s2);
  c.A4 = c.A1 * c.A3 / c.M1 + inv_d2 / 4.0;
  c.A5 = c.A3 + c.A1 * inv_d2 / (4.0 * c.M1);
  c.M3 = c.M1 - c.A1 * c.A1 / c.M1;
  require_regular(c.M3, "M3");
  c.M4 = c.M2 - c.A3 * c.A3 / (4.0 * c.M1) - c.A4 * c.A4 / (4.0 * c.M3);
  require_regular(c.M4, "M4");
  c.A6 = -2.0 * c.A2 + c.A4 * c.A5 / (2.0 * c.M3) + c.A3 * alpha / (2.0 * c.M1);
  c.M5 = c.M2 - alpha * alpha / (4.0 * c.M1) - c.A6 * c.A6 / (4.0 * c.M4) - c.A5 * c.A5 / (4.0 * c.M3);
  require_regular(c.M5, "M5");
  return c;
}

RateResult rate_closed_form_as_printed(double x1, double x2, const PumpParams& pump, const CrystalParams& crystal,
                                       const ChannelParams& channel) {
  const auto c = closed_form_constants(pump, crystal, channel);
  const double k = wavevector(pump.wavelength);
  const double z = channel.z;
  const double z2 = z * z;
  const double inv_d2 = pump.delta.inverse_square();
  const auto& [A, A1, A2, A3, A4, A5, A6, M1, M2, M3, M4, M5] = c;
  (void)A2;
  (void)M2;

  const cdouble first =
      -(k * k / (16.0 * M1 * z2)) *
          (x1 * x1 + A1 * A1 * x1 * x1 / (M1 * M3) + x2 * x2 * M1 / M3 + 2.0 * A1 * x1 * x2 / M3) +
      (k * k / (16.0 * M4 * z2)) * (-1.0 - A3 * A3 * x1 * x1 / (4.0 * M1 * M1) + A3 * x1 * x1 / M1 +
                                    A4 * x1 * x2 / M3 - A4 * A4 * x2 * x2 / (4.0 * M3 * M3));

  const cdouble bracket = -kI * k * x2 / (2.0 * z) + kI * k * x1 * inv_d2 / (16.0 * M1 * z) +
                          (kI * A5 * k / (4.0 * M3 * z)) * (A1 * x1 / M1);
  const cdouble second =
      (A4 * k * k * x1 / (16.0 * z2 * M1 * M3 * M4)) *
          (A1 * x1 - A3 * x2 / 2.0 - A1 * A1 * x1 / (4.0 * M1 * M3) - A1 * A3 * x1 / (2.0 * M1) -
           A1 * x2 / (2.0 * M3)) +
      bracket * bracket / (4.0 * M5);

  const cdouble third = (kI * A6 * k / (4.0 * M1 * z)) *
                        (A1 * A4 * x1 / (2.0 * M1 * M3) + A4 * x2 / (2.0 * M3) - x1 + A3 * x1 / (2.0 * M1));

  const cdouble log_rate = std::log(A) + first + second + third;
  RateResult r;
  r.method = Method::ClosedFormAsPrinted;
  r.value = std::exp(log_rate.real()) * pump.amplitude;
  r.imag_residue = 0.0;
  return r;
}

}  // namespace biphoton
