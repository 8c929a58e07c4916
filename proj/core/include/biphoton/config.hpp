#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/evaluators.hpp"
#include "biphoton/scenarios.hpp"

namespace biphoton {

// Every key accepted in a config file or as a --<key> flag.
const std::vector<std::string>& config_keys();

// Key/value text with its origin, before unit parsing.
class ConfigText {
 public:
  // "key = value" lines; '#' starts a comment. Throws ParseError with
  // "<origin>:<line>" on malformed lines or unknown keys.
  static ConfigText parse(std::string_view text, const std::string& origin = "<config>");
  // A *.json file is read as emitted metadata (its "config" object);
  // anything else as key/value text.
  static ConfigText load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value, const std::string& origin);
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::string> origins_;
  friend struct RunConfig;
};

struct RunConfig {
  PumpParams pump;
  CrystalParams crystal;
  ChannelParams channel;
  double x1 = 0.0;
  std::optional<double> x2_min;
  std::optional<double> x2_max;
  int n_points = 201;
  Method method = Method::GaussianEngine;
  TurbulenceKernelMode mode = TurbulenceKernelMode::CrossTerm;
  double rel_tol = 1e-4;
  unsigned threads = 0;
  std::filesystem::path out_dir = "out";
  // Sweep grid: explicit list, or log grid from cn2_min..cn2_max.
  std::vector<double> cn2_grid;
  // Sweep coherence specs; defaults to {pump.delta}.
  std::vector<CoherenceLength> deltas;

  // Parses and validates; throws ParseError naming the key path on failure.
  static RunConfig from_text(const ConfigText& text);

  EvalOptions eval_options() const { return EvalOptions{mode, rel_tol, threads}; }
  // The scan implied by x1/x2_min/x2_max/n_points, defaulting to +-5w.
  DetectorScan resolve_scan() const;
  std::vector<CoherenceLength> sweep_deltas() const;
  std::vector<double> sweep_grid() const;

  // Config entries (SI, shortest round-trip) that reproduce this run when
  // fed back through from_text.
  std::map<std::string, std::string> to_entries(const DetectorScan* resolved_scan = nullptr) const;
};

}  // namespace biphoton
