#include "biphoton/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <system_error>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be a positive finite number, got " +
                      format_double(value));
  }
}

struct UnitEntry {
  Unit unit;
  std::string_view suffix;
  int decimal_exponent;
};

constexpr std::array<UnitEntry, 6> kUnits{{
    {Unit::None, "", 0},
    {Unit::Meter, "m", 0},
    {Unit::Millimeter, "mm", -3},
    {Unit::Micrometer, "um", -6},
    {Unit::Nanometer, "nm", -9},
    {Unit::Kilometer, "km", 3},
}};

const UnitEntry& entry(Unit unit) {
  for (const auto& e : kUnits) {
    if (e.unit == unit) return e;
  }
  throw std::logic_error("unknown unit");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Length of the leading decimal literal: [sign] digits [. digits] [e [sign] digits].
std::size_t number_prefix_length(std::string_view s) {
  std::size_t i = 0;
  auto digits = [&] {
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    return i - start;
  };
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t mantissa_digits = digits();
  if (i < s.size() && s[i] == '.') {
    ++i;
    mantissa_digits += digits();
  }
  if (mantissa_digits == 0) return 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t save = i++;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (digits() == 0) i = save;
  }
  return i;
}

// Parses a decimal literal scaled by 10^shift with a single rounding, by
// moving the shift into the literal's exponent.
double parse_scaled(std::string_view literal, int shift, std::string_view original) {
  std::string text(literal);
  if (!text.empty() && text.front() == '+') text.erase(0, 1);
  int exponent = 0;
  if (auto pos = text.find_first_of("eE"); pos != std::string::npos) {
    const std::string exp_text = text.substr(pos + 1);
    const char* first = exp_text.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{}) throw ParseError("malformed exponent in '" + std::string(original) + "'");
    text.resize(pos);
  }
  text += 'e';
  text += std::to_string(exponent + shift);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("malformed number '" + std::string(literal) + "' in '" +
                     std::string(original) + "'");
  }
  if (!std::isfinite(value)) throw ParseError("number out of range in '" + std::string(original) + "'");
  return value;
}

}  // namespace

CoherenceLength CoherenceLength::finite(double meters) {
  require_positive(meters, "coherence length");
  CoherenceLength c;
  c.infinite_ = false;
  c.value_ = meters;
  return c;
}

double CoherenceLength::meters() const {
  if (infinite_) throw std::logic_error("coherence length is infinite");
  return value_;
}

void PumpParams::validate() const {
  require_positive(wavelength, "pump wavelength");
  require_positive(sigma, "pump beam waist sigma");
  require_positive(amplitude, "pump amplitude");
  if (!delta.is_infinite()) require_positive(delta.meters(), "pump coherence length delta");
}

void CrystalParams::validate() const {
  require_positive(length, "crystal length L");
  if (!std::isfinite(gamma)) throw DomainError("phase-matching parameter gamma must be finite");
  if (wavelength_signal != 0.0) require_positive(wavelength_signal, "signal wavelength");
  if (wavelength_idler != 0.0) require_positive(wavelength_idler, "idler wavelength");
}

double CrystalParams::signal_wavelength(const PumpParams& pump) const {
  return wavelength_signal == 0.0 ? 2.0 * pump.wavelength : wavelength_signal;
}

double CrystalParams::idler_wavelength(const PumpParams& pump) const {
  return wavelength_idler == 0.0 ? 2.0 * pump.wavelength : wavelength_idler;
}

void ChannelParams::validate() const {
  if (!(cn2 >= 0.0) || !std::isfinite(cn2)) {
    throw DomainError("turbulence strength cn2 must be >= 0, got " + format_double(cn2));
  }
  require_positive(z, "link distance z");
}

void DetectorScan::validate() const {
  if (!std::isfinite(x1)) throw DomainError("x1 must be finite");
  if (!(x2_min < x2_max) || !std::isfinite(x2_min) || !std::isfinite(x2_max)) {
    throw DomainError("scan bounds must satisfy x2_min < x2_max");
  }
  if (n_points < 2) throw DomainError("scan needs at least 2 points");
}

double DetectorScan::sample(int index) const {
  // Offsets from the midpoint, so a symmetric range gives exactly mirrored samples.
  const double mid = 0.5 * (x2_min + x2_max);
  const double step = (x2_max - x2_min) / static_cast<double>(n_points - 1);
  const double offset = static_cast<double>(index) - 0.5 * static_cast<double>(n_points - 1);
  return mid + offset * step;
}

double wavevector(double wavelength) {
  require_positive(wavelength, "wavelength");
  return 2.0 * std::numbers::pi / wavelength;
}

CoherenceLength lateral_coherence_length(double cn2, double k, double z) {
  if (!(cn2 >= 0.0) || !std::isfinite(cn2)) {
    throw DomainError("turbulence strength cn2 must be >= 0, got " + format_double(cn2));
  }
  require_positive(k, "wavenumber");
  require_positive(z, "link distance z");
  if (cn2 == 0.0) return CoherenceLength::infinite();
  return CoherenceLength::finite(std::pow(0.55 * cn2 * k * k * z, -0.6));
}

double pump_delta_from_diffuser(double wavelength, double focal_length, double spot_size) {
  require_positive(wavelength, "pump wavelength");
  require_positive(focal_length, "focal length");
  require_positive(spot_size, "diffuser spot size");
  return 3.832 * wavelength * focal_length / (2.0 * std::numbers::pi * spot_size);
}

std::string_view unit_suffix(Unit unit) noexcept {
  for (const auto& e : kUnits) {
    if (e.unit == unit) return e.suffix;
  }
  return "";
}

double unit_scale(Unit unit) noexcept {
  for (const auto& e : kUnits) {
    if (e.unit == unit) return std::pow(10.0, e.decimal_exponent);
  }
  return 1.0;
}

Quantity parse_quantity(std::string_view text) {
  const std::string_view s = trim(text);
  const std::size_t n = number_prefix_length(s);
  if (n == 0) throw ParseError("malformed number in '" + std::string(text) + "'");
  const std::string_view suffix = s.substr(n);
  for (const auto& e : kUnits) {
    if (e.suffix == suffix) {
      return Quantity{parse_scaled(s.substr(0, n), e.decimal_exponent, text), e.unit};
    }
  }
  throw ParseError("unknown unit '" + std::string(suffix) + "' in '" + std::string(text) +
                   "' (expected one of m, mm, um, nm, km)");
}

CoherenceLength parse_coherence(std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "inf" || s == "fully_coherent") return CoherenceLength::infinite();
  const Quantity q = parse_quantity(s);
  if (!(q.value > 0.0)) throw ParseError("coherence length must be positive in '" + std::string(text) + "'");
  return CoherenceLength::finite(q.value);
}

std::string format_quantity(double value_si, Unit unit) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value_si,
                                 std::chars_format::scientific);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  std::string text(buf.data(), ptr);
  const auto pos = text.find('e');
  const int exponent = std::stoi(text.substr(pos + 1)) - entry(unit).decimal_exponent;
  text.resize(pos);
  text += 'e';
  text += std::to_string(exponent);
  text += unit_suffix(unit);
  return text;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  return std::string(buf.data(), ptr);
}

}  // namespace biphoton
