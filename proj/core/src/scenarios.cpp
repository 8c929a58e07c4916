#include "biphoton/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own slot, so the output is independent of scheduling. The
// lowest-index failure is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) run(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string describe_delta(const CoherenceLength& delta) {
  return delta.is_infinite() ? "inf" : format_quantity(delta.meters(), Unit::Millimeter);
}

}  // namespace

std::vector<double> normalize(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const double peak = *std::max_element(out.begin(), out.end());
  if (!(peak > 0.0)) throw DomainError("cannot normalise a series without a positive maximum");
  for (double& v : out) v /= peak;
  return out;
}

CoincidenceProfile scan_profile(const DetectorScan& scan, const PumpParams& pump, const CrystalParams& crystal,
                                const ChannelParams& channel, Method method, const EvalOptions& options) {
  scan.validate();
  CoincidenceProfile profile;
  profile.x1 = scan.x1;
  profile.method = method;
  const auto n = static_cast<std::size_t>(scan.n_points);
  profile.x2.resize(n);
  profile.raw.resize(n);
  for (std::size_t i = 0; i < n; ++i) profile.x2[i] = scan.sample(static_cast<int>(i));

  parallel_for(n, options.threads, [&](std::size_t i) {
    const double x2 = profile.x2[i];
    try {
      profile.raw[i] = evaluate_rate(method, scan.x1, x2, pump, crystal, channel, options.mode, options.rel_tol).value;
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "evaluation failed at x2 = " << format_double(x2) << " m: " << e.what();
      std::throw_with_nested(EvaluationError(msg.str(), x2));
    }
  });
  profile.normalized = normalize(profile.raw);

  std::ostringstream canon;
  canon << canonical_parameters(pump, crystal, channel) << ";x1=" << format_double(scan.x1)
        << ";x2_min=" << format_double(scan.x2_min) << ";x2_max=" << format_double(scan.x2_max)
        << ";n_points=" << scan.n_points << ";method=" << to_string(method) << ";kernel=" << to_string(options.mode);
  if (method == Method::Quadrature) canon << ";rel_tol=" << format_double(options.rel_tol);
  profile.fingerprint = params_fingerprint(canon.str());
  return profile;
}

RobustnessCurve robustness_curve(std::span<const double> cn2_grid, double z, const PumpParams& pump,
                                 const CrystalParams& crystal, Method method, const EvalOptions& options) {
  if (cn2_grid.empty()) throw DomainError("cn2 grid is empty");
  for (std::size_t i = 1; i < cn2_grid.size(); ++i) {
    if (!(cn2_grid[i] > cn2_grid[i - 1])) throw DomainError("cn2 grid must be strictly increasing");
  }
  ChannelParams baseline_channel{0.0, z};
  baseline_channel.validate();

  RobustnessCurve curve;
  curve.delta = pump.delta;
  curve.cn2.assign(cn2_grid.begin(), cn2_grid.end());
  std::vector<double> rates(cn2_grid.size() + 1);
  parallel_for(rates.size(), options.threads, [&](std::size_t i) {
    const double cn2 = i == 0 ? 0.0 : cn2_grid[i - 1];
    try {
      rates[i] = evaluate_rate(method, 0.0, 0.0, pump, crystal, ChannelParams{cn2, z}, options.mode, options.rel_tol).value;
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "evaluation failed at cn2 = " << format_double(cn2) << ": " << e.what();
      std::throw_with_nested(EvaluationError(msg.str(), cn2));
    }
  });
  curve.normalized_peak.resize(cn2_grid.size());
  for (std::size_t i = 0; i < cn2_grid.size(); ++i) curve.normalized_peak[i] = rates[i + 1] / rates[0];
  return curve;
}

double turbulence_contrast(double z, const PumpParams& pump, const CrystalParams& crystal, double cn2_weak,
                           double cn2_strong, const EvalOptions& options) {
  if (cn2_weak > cn2_strong) throw DomainError("turbulence_contrast needs cn2_weak <= cn2_strong");
  const double weak = rate_gaussian_engine(0.0, 0.0, pump, crystal, ChannelParams{cn2_weak, z}, options.mode).value;
  if (cn2_weak == cn2_strong) return 0.0;
  const double strong = rate_gaussian_engine(0.0, 0.0, pump, crystal, ChannelParams{cn2_strong, z}, options.mode).value;
  return (weak - strong) / weak;
}

double profile_half_width(double x1, const PumpParams& pump, const CrystalParams& crystal, double z,
                          TurbulenceKernelMode mode) {
  const ChannelParams clear{0.0, z};
  const double peak = rate_gaussian_engine(x1, 0.0, pump, crystal, clear, mode).value;
  const double target = peak * std::exp(-1.0);
  auto above = [&](double w) { return rate_gaussian_engine(x1, w, pump, crystal, clear, mode).value > target; };

  double lo = 0.0;
  double hi = 1e-6;
  while (above(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("profile half-width search diverged");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DetectorScan default_scan(const PumpParams& pump, const CrystalParams& crystal, double z) {
  const double w = profile_half_width(0.0, pump, crystal, z);
  return DetectorScan{0.0, -5.0 * w, 5.0 * w, 201};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

FigurePreset figure_preset(std::string_view name, const PumpParams& base_pump, const CrystalParams& base_crystal) {
  constexpr std::array<double, 4> distances{1e3, 5e3, 7e3, 20e3};
  constexpr std::array<double, 2> strengths{1e-14, 5e-14};

  FigurePreset preset;
  preset.name = std::string(name);

  auto scan_preset = [&](CoherenceLength delta) {
    preset.kind = FigurePreset::Kind::Scan;
    for (double z : distances) {
      for (double cn2 : strengths) {
        Scenario s;
        s.pump = base_pump;
        s.pump.delta = delta;
        s.crystal = base_crystal;
        s.channel = ChannelParams{cn2, z};
        s.label = preset.name + "_z" + format_double(z / 1e3) + "km_cn2_" + format_double(cn2) + "_delta_" +
                  describe_delta(delta);
        preset.scenarios.push_back(std::move(s));
      }
    }
  };

  if (name == "fig2") {
    scan_preset(CoherenceLength::infinite());
  } else if (name == "fig3") {
    scan_preset(CoherenceLength::finite(0.0876e-3));
  } else if (name == "fig4") {
    scan_preset(CoherenceLength::finite(0.0417e-3));
  } else if (name == "fig5") {
    preset.kind = FigurePreset::Kind::Sweep;
    preset.cn2_grid = log_grid(1e-15, 5e-14, 10);
    for (auto delta : {CoherenceLength::infinite(), CoherenceLength::finite(0.0876e-3),
                       CoherenceLength::finite(0.0417e-3), CoherenceLength::finite(0.0253e-3)}) {
      Scenario s;
      s.pump = base_pump;
      s.pump.delta = delta;
      s.crystal = base_crystal;
      s.channel = ChannelParams{0.0, 20e3};
      s.label = "fig5_z20km_delta_" + describe_delta(delta);
      preset.scenarios.push_back(std::move(s));
    }
  } else {
    std::string valid;
    for (auto n : kPresetNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw std::invalid_argument("unknown figure preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return preset;
}

std::string canonical_parameters(const PumpParams& pump, const CrystalParams& crystal, const ChannelParams& channel) {
  std::ostringstream out;
  out << "schema=1;wavelength_p=" << format_double(pump.wavelength) << ";sigma=" << format_double(pump.sigma)
      << ";delta=" << (pump.delta.is_infinite() ? std::string("fully_coherent") : format_double(pump.delta.meters()))
      << ";amplitude=" << format_double(pump.amplitude) << ";L=" << format_double(crystal.length)
      << ";gamma=" << format_double(crystal.gamma)
      << ";wavelength_s=" << format_double(crystal.signal_wavelength(pump))
      << ";wavelength_i=" << format_double(crystal.idler_wavelength(pump)) << ";cn2=" << format_double(channel.cn2)
      << ";z=" << format_double(channel.z);
  return out.str();
}

std::string params_fingerprint(std::string_view canonical_text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(canonical_text.data(), canonical_text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < 8 && i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace biphoton
