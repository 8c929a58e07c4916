#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/evaluators.hpp"

namespace biphoton {

struct EvalOptions {
  TurbulenceKernelMode mode = TurbulenceKernelMode::CrossTerm;
  double rel_tol = 1e-4;  // quadrature only
  // Worker threads for independent scenario points; 0 = hardware concurrency.
  // Results never depend on this value.
  unsigned threads = 0;
};

// Raised when one point of a scan or sweep fails; the evaluator's exception
// is nested inside.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double coordinate)
      : std::runtime_error(what), coordinate_(coordinate) {}
  double coordinate() const noexcept { return coordinate_; }

 private:
  double coordinate_;
};

struct CoincidenceProfile {
  double x1 = 0.0;
  std::vector<double> x2;
  std::vector<double> raw;
  std::vector<double> normalized;
  std::string fingerprint;
  Method method = Method::GaussianEngine;
};

struct RobustnessCurve {
  std::vector<double> cn2;
  std::vector<double> normalized_peak;
  CoherenceLength delta = CoherenceLength::infinite();
};

// Divides by the maximum; the argmax maps to exactly 1.
std::vector<double> normalize(std::span<const double> values);

// Scan the idler detector across `scan` with the signal detector fixed.
CoincidenceProfile scan_profile(const DetectorScan& scan, const PumpParams& pump, const CrystalParams& crystal,
                                const ChannelParams& channel, Method method, const EvalOptions& options = {});

// R(0,0; cn2) / R(0,0; cn2 = 0) over a strictly increasing grid.
RobustnessCurve robustness_curve(std::span<const double> cn2_grid, double z, const PumpParams& pump,
                                 const CrystalParams& crystal, Method method, const EvalOptions& options = {});

// Fractional drop of the on-axis rate from weak to strong turbulence.
double turbulence_contrast(double z, const PumpParams& pump, const CrystalParams& crystal, double cn2_weak,
                           double cn2_strong, const EvalOptions& options = {});

// 1/e half-width in x2 of the turbulence-free profile at the given x1,
// found by bracketing and bisection on the engine.
double profile_half_width(double x1, const PumpParams& pump, const CrystalParams& crystal, double z,
                          TurbulenceKernelMode mode = TurbulenceKernelMode::CrossTerm);

// x2 in [-5w, 5w], 201 points, x1 = 0.
DetectorScan default_scan(const PumpParams& pump, const CrystalParams& crystal, double z);

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

struct Scenario {
  std::string label;
  PumpParams pump;
  CrystalParams crystal;
  ChannelParams channel;
};

struct FigurePreset {
  enum class Kind { Scan, Sweep };
  std::string name;
  Kind kind = Kind::Scan;
  // Scan presets: one scenario per (z, cn2) panel series. Sweep presets: one
  // scenario per coherence setting; channel.cn2 is unused and cn2_grid applies.
  std::vector<Scenario> scenarios;
  std::vector<double> cn2_grid;
};

inline constexpr std::array<std::string_view, 4> kPresetNames{"fig2", "fig3", "fig4", "fig5"};

// Throws std::invalid_argument listing valid names for an unknown preset.
FigurePreset figure_preset(std::string_view name, const PumpParams& base_pump = {},
                           const CrystalParams& base_crystal = {});

// Canonical text of every numeric input (shortest round-trip doubles) and
// its SHA-256 digest truncated to 16 hex digits.
std::string canonical_parameters(const PumpParams& pump, const CrystalParams& crystal, const ChannelParams& channel);
std::string params_fingerprint(std::string_view canonical_text);

}  // namespace biphoton
