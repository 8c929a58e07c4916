#pragma once

#include <string>
#include <string_view>

namespace biphoton {

// A length that may be infinite: a fully coherent pump (delta = inf) or a
// turbulence-free channel (alpha = inf). The infinite state is explicit so
// that 1/length^2 terms can be dropped exactly rather than computed from a
// large float.
class CoherenceLength {
 public:
  static CoherenceLength finite(double meters);
  static CoherenceLength infinite() { return CoherenceLength{}; }

  bool is_infinite() const noexcept { return infinite_; }
  // Throws std::logic_error when infinite.
  double meters() const;
  // Exactly 0 for the infinite state.
  double inverse_square() const noexcept { return infinite_ ? 0.0 : 1.0 / (value_ * value_); }

  friend bool operator==(const CoherenceLength&, const CoherenceLength&) = default;

 private:
  CoherenceLength() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

struct PumpParams {
  double wavelength = 405e-9;
  double sigma = 1.0e-3;
  CoherenceLength delta = CoherenceLength::infinite();
  double amplitude = 1.0;

  // Throws DomainError naming the offending field.
  void validate() const;
};

struct CrystalParams {
  double length = 2.0e-3;
  double gamma = 1.0;
  // Zero means "degenerate": twice the pump wavelength.
  double wavelength_signal = 0.0;
  double wavelength_idler = 0.0;

  void validate() const;
  double signal_wavelength(const PumpParams& pump) const;
  double idler_wavelength(const PumpParams& pump) const;
};

struct ChannelParams {
  double cn2 = 1e-14;
  double z = 20e3;

  void validate() const;
};

struct DetectorScan {
  double x1 = 0.0;
  double x2_min = -1e-3;
  double x2_max = 1e-3;
  int n_points = 201;

  void validate() const;
  double sample(int index) const;
};

// k = 2 pi / lambda.
double wavevector(double wavelength);

// Kolmogorov lateral coherence length alpha = (0.55 Cn2 k^2 z)^(-3/5).
// cn2 == 0 yields the infinite (no-turbulence) state.
CoherenceLength lateral_coherence_length(double cn2, double k, double z);

// Pump coherence length behind a rotating diffuser in a 2f geometry,
// delta = 3.832 lambda f / (2 pi d).
double pump_delta_from_diffuser(double wavelength, double focal_length, double spot_size);

enum class Unit { None, Meter, Millimeter, Micrometer, Nanometer, Kilometer };

struct Quantity {
  double value;  // SI
  Unit unit;     // unit as written
};

std::string_view unit_suffix(Unit unit) noexcept;
double unit_scale(Unit unit) noexcept;

// "<number><unit>" with unit in {m, mm, um, nm, km}, or a bare number
// (dimensionless, e.g. Cn2 in m^-2/3). "inf" is rejected here.
Quantity parse_quantity(std::string_view text);
// Accepts everything parse_quantity does, plus "inf" for a fully coherent pump.
CoherenceLength parse_coherence(std::string_view text);

// Inverse of parse_quantity: shortest round-trip representation of
// value/scale(unit) followed by the unit suffix.
std::string format_quantity(double value_si, Unit unit);
// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace biphoton
