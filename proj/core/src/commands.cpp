#include "biphoton/commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "biphoton/errors.hpp"
#include "biphoton/gaussian_integral.hpp"
#include "biphoton/output.hpp"

namespace biphoton {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json delta_json(const CoherenceLength& d) {
  return d.is_infinite() ? json("fully_coherent") : json(d.meters());
}

std::string delta_label(const CoherenceLength& d) {
  return d.is_infinite() ? "inf" : format_quantity(d.meters(), Unit::Millimeter);
}

json parameters_json(const RunConfig& c, const DetectorScan* scan) {
  json p;
  p["wavelength_p_m"] = c.pump.wavelength;
  p["sigma_m"] = c.pump.sigma;
  p["delta"] = delta_json(c.pump.delta);
  p["amplitude"] = c.pump.amplitude;
  p["crystal_length_m"] = c.crystal.length;
  p["gamma"] = c.crystal.gamma;
  p["wavelength_s_m"] = c.crystal.signal_wavelength(c.pump);
  p["wavelength_i_m"] = c.crystal.idler_wavelength(c.pump);
  p["cn2_m_to_minus_2_3"] = c.channel.cn2;
  p["z_m"] = c.channel.z;
  if (scan) {
    p["x1_m"] = scan->x1;
    p["x2_min_m"] = scan->x2_min;
    p["x2_max_m"] = scan->x2_max;
    p["n_points"] = scan->n_points;
  }
  p["rel_tol"] = c.rel_tol;
  return p;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Refuses to replace output produced from different parameters unless asked.
void guard_overwrite(const std::filesystem::path& meta_path, const std::string& fingerprint, bool overwrite) {
  if (overwrite || !std::filesystem::exists(meta_path)) return;
  std::ifstream in(meta_path);
  json old;
  try {
    old = json::parse(in);
  } catch (const json::exception&) {
    throw UsageError(meta_path.string() + " exists and is not valid metadata; pass --overwrite to replace it");
  }
  if (old.value("fingerprint", std::string{}) != fingerprint) {
    throw UsageError(meta_path.string() + " was produced from different parameters (fingerprint " +
                     old.value("fingerprint", std::string{"?"}) + " vs " + fingerprint +
                     "); pass --overwrite to replace it");
  }
}

RunConfig scenario_config(const RunConfig& base, const Scenario& s) {
  RunConfig c = base;
  c.pump = s.pump;
  c.crystal = s.crystal;
  c.channel = s.channel;
  c.x2_min.reset();
  c.x2_max.reset();
  c.x1 = 0.0;
  return c;
}

std::string sweep_fingerprint(const RunConfig& c, const CoherenceLength& delta, const std::vector<double>& grid) {
  PumpParams pump = c.pump;
  pump.delta = delta;
  std::string canon = canonical_parameters(pump, c.crystal, ChannelParams{0.0, c.channel.z});
  canon += ";grid=";
  for (double g : grid) canon += format_double(g) + ",";
  canon += ";method=" + std::string(to_string(c.method)) + ";kernel=" + std::string(to_string(c.mode));
  if (c.method == Method::Quadrature) canon += ";rel_tol=" + format_double(c.rel_tol);
  return params_fingerprint(canon);
}

struct SeriesFile {
  std::filesystem::path csv;
  std::string fingerprint;
};

SeriesFile write_profile(const RunConfig& c, const std::string& stem, bool embed_fingerprint, bool overwrite,
                         CommandResult& result, const std::string& command) {
  const DetectorScan scan = c.resolve_scan();
  const auto profile = scan_profile(scan, c.pump, c.crystal, c.channel, c.method, c.eval_options());
  const std::string base = embed_fingerprint ? stem + "_" + profile.fingerprint : stem;
  const auto csv = c.out_dir / (base + ".csv");
  const auto meta = c.out_dir / (base + ".meta.json");
  guard_overwrite(meta, profile.fingerprint, overwrite);
  write_file(csv, profile_csv(profile));
  write_file(meta, dump(series_metadata(command, c, &scan, profile.fingerprint)));
  result.files.push_back(csv);
  result.files.push_back(meta);
  return {csv, profile.fingerprint};
}

json check(const std::string& name, bool passed, double value, double threshold, const std::string& detail = {}) {
  json j;
  j["name"] = name;
  j["passed"] = passed;
  j["value"] = number_or_null(value);
  j["threshold"] = threshold;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

double rel_dev(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

json series_metadata(const std::string& command, const RunConfig& config, const DetectorScan* scan,
                     const std::string& fingerprint) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "biphoton";
  j["tool_version"] = tool_version();
  j["command"] = command;
  j["fingerprint"] = fingerprint;
  j["method"] = std::string(to_string(config.method));
  j["kernel"] = std::string(to_string(config.mode));
  j["parameters"] = parameters_json(config, scan);
  j["config"] = config.to_entries(scan);
  return j;
}

CommandResult cmd_scan(const RunConfig& config, const CommandOptions& options) {
  prepare_output_dir(config.out_dir);
  CommandResult result;
  if (!options.preset) {
    write_profile(config, "scan", false, options.overwrite, result, "scan");
    return result;
  }
  FigurePreset preset;
  try {
    preset = figure_preset(*options.preset, config.pump, config.crystal);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (preset.kind != FigurePreset::Kind::Scan) {
    throw UsageError("preset " + preset.name + " is a turbulence sweep; use 'sweep --preset'");
  }
  for (const auto& s : preset.scenarios) {
    write_profile(scenario_config(config, s), s.label, true, options.overwrite, result, "scan");
  }
  return result;
}

CommandResult cmd_sweep(const RunConfig& config, const CommandOptions& options) {
  prepare_output_dir(config.out_dir);
  RunConfig c = config;
  std::vector<CoherenceLength> deltas = c.sweep_deltas();
  std::vector<double> grid = c.sweep_grid();
  if (options.preset) {
    FigurePreset preset;
    try {
      preset = figure_preset(*options.preset, c.pump, c.crystal);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (preset.kind != FigurePreset::Kind::Sweep) {
      throw UsageError("preset " + preset.name + " is a detector scan; use 'scan --preset'");
    }
    deltas.clear();
    for (const auto& s : preset.scenarios) deltas.push_back(s.pump.delta);
    grid = preset.cn2_grid;
    c.channel.z = preset.scenarios.front().channel.z;
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ParseError("cn2_grid: grid must be strictly increasing");
  }

  CommandResult result;
  json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["tool"] = "biphoton";
  meta["tool_version"] = tool_version();
  meta["command"] = "sweep";
  meta["method"] = std::string(to_string(c.method));
  meta["kernel"] = std::string(to_string(c.mode));
  meta["parameters"] = parameters_json(c, nullptr);
  meta["cn2_grid"] = grid;
  meta["baseline"] = "cn2 = 0";
  meta["series"] = json::array();
  std::string combined;
  for (const auto& delta : deltas) {
    PumpParams pump = c.pump;
    pump.delta = delta;
    const auto curve = robustness_curve(grid, c.channel.z, pump, c.crystal, c.method, c.eval_options());
    const std::string fp = sweep_fingerprint(c, delta, grid);
    combined += fp;
    const auto csv = c.out_dir / ("sweep_delta_" + delta_label(delta) + "_" + fp + ".csv");
    write_file(csv, robustness_csv(curve));
    result.files.push_back(csv);
    meta["series"].push_back({{"file", csv.filename().string()}, {"delta", delta_json(delta)}, {"fingerprint", fp}});
  }
  meta["fingerprint"] = params_fingerprint(combined);
  RunConfig recorded = c;
  recorded.cn2_grid = grid;
  recorded.deltas = deltas;
  meta["config"] = recorded.to_entries();
  const auto meta_path = c.out_dir / "sweep.meta.json";
  guard_overwrite(meta_path, meta["fingerprint"].get<std::string>(), options.overwrite);
  write_file(meta_path, dump(meta));
  result.files.push_back(meta_path);
  return result;
}

CommandResult cmd_figure(const std::string& name, const RunConfig& config) {
  FigurePreset preset;
  try {
    preset = figure_preset(name, config.pump, config.crystal);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  prepare_output_dir(config.out_dir);
  CommandResult result;
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["tool"] = "biphoton";
  manifest["tool_version"] = tool_version();
  manifest["figure"] = preset.name;
  manifest["method"] = std::string(to_string(config.method));
  manifest["kernel"] = std::string(to_string(config.mode));
  manifest["series"] = json::array();

  if (preset.kind == FigurePreset::Kind::Scan) {
    manifest["kind"] = "scan";
    manifest["x_axis"] = {{"column", "x2_m"}, {"quantity", "idler detector position x2"}, {"unit", "m"}};
    manifest["y_axis"] = {{"column", "rate_norm"},
                          {"raw_column", "rate_raw"},
                          {"quantity", "coincidence rate at x1 = 0, normalised to the series maximum"},
                          {"unit", "1"}};
    int index = 0;
    for (const auto& s : preset.scenarios) {
      const RunConfig c = scenario_config(config, s);
      const auto file = write_profile(c, s.label, true, true, result, "figure " + preset.name);
      manifest["series"].push_back({{"file", file.csv.filename().string()},
                                    {"label", s.label},
                                    {"panel", std::string(1, static_cast<char>('a' + index / 2))},
                                    {"delta", delta_json(s.pump.delta)},
                                    {"z_m", s.channel.z},
                                    {"cn2_m_to_minus_2_3", s.channel.cn2},
                                    {"fingerprint", file.fingerprint}});
      ++index;
    }
  } else {
    manifest["kind"] = "sweep";
    manifest["x_axis"] = {{"column", "cn2_m_to_minus_2_3"}, {"quantity", "turbulence strength Cn2"}, {"unit", "m^-2/3"}};
    manifest["y_axis"] = {{"column", "rate_norm"},
                          {"quantity", "on-axis coincidence rate R(0,0) over the cn2 = 0 value"},
                          {"unit", "1"}};
    manifest["cn2_grid"] = preset.cn2_grid;
    for (const auto& s : preset.scenarios) {
      RunConfig c = scenario_config(config, s);
      const auto curve = robustness_curve(preset.cn2_grid, s.channel.z, s.pump, s.crystal, c.method, c.eval_options());
      const std::string fp = sweep_fingerprint(c, s.pump.delta, preset.cn2_grid);
      const auto csv = config.out_dir / (s.label + "_" + fp + ".csv");
      write_file(csv, robustness_csv(curve));
      result.files.push_back(csv);
      manifest["series"].push_back({{"file", csv.filename().string()},
                                    {"label", s.label},
                                    {"delta", delta_json(s.pump.delta)},
                                    {"z_m", s.channel.z},
                                    {"fingerprint", fp}});
    }
  }
  const auto path = config.out_dir / (preset.name + ".manifest.json");
  write_file(path, dump(manifest));
  result.files.push_back(path);
  return result;
}

CommandResult cmd_validate(const RunConfig& config) {
  prepare_output_dir(config.out_dir);
  const RunConfig& c = config;
  json checks = json::array();
  bool all_passed = true;
  auto record = [&](json j) {
    all_passed = all_passed && j["passed"].get<bool>();
    checks.push_back(std::move(j));
  };

  // Closed-form Gaussian identities.
  {
    ComplexQuadraticForm f(1);
    f.matrix(0, 0) = 1.0;
    const double v1 = gaussian_integral(f).value.real();
    record(check("gaussian_identity_1d", rel_dev(v1, std::sqrt(std::numbers::pi)) < 1e-12, rel_dev(v1, std::sqrt(std::numbers::pi)), 1e-12));
    f.vector(0) = 2.0;
    const double v2 = gaussian_integral(f).value.real();
    const double e2 = std::sqrt(std::numbers::pi) * std::exp(1.0);
    record(check("gaussian_identity_1d_shifted", rel_dev(v2, e2) < 1e-12, rel_dev(v2, e2), 1e-12));
    ComplexQuadraticForm g(2);
    g.matrix(0, 0) = 1.0;
    g.matrix(1, 1) = 2.0;
    const double v3 = gaussian_integral(g).value.real();
    record(check("gaussian_identity_2d", rel_dev(v3, std::numbers::pi / std::sqrt(2.0)) < 1e-12,
                 rel_dev(v3, std::numbers::pi / std::sqrt(2.0)), 1e-12));
  }

  const double w = profile_half_width(0.0, c.pump, c.crystal, c.channel.z, c.mode);

  // Engine against the quadrature oracle.
  for (double x2 : {0.0, w, 2.0 * w}) {
    const std::string name = "oracle_equivalence_x2_" + format_double(x2);
    try {
      const auto e = rate_gaussian_engine(0.0, x2, c.pump, c.crystal, c.channel, c.mode);
      const auto q = rate_quadrature(0.0, x2, c.pump, c.crystal, c.channel, c.mode, c.rel_tol);
      const double dev = rel_dev(e.value, q.value);
      record(check(name, dev < 1e-3, dev, 1e-3));
    } catch (const OracleFailure& ex) {
      record(check(name, false, ex.error_bound(), 1e-3, ex.what()));
    }
  }

  // Structural limits.
  {
    PumpParams near = c.pump;
    near.delta = CoherenceLength::finite(100.0 * c.pump.sigma);
    PumpParams full = c.pump;
    full.delta = CoherenceLength::infinite();
    const double dev = rel_dev(rate_gaussian_engine(0.0, 0.0, near, c.crystal, c.channel, c.mode).value,
                               rate_gaussian_engine(0.0, 0.0, full, c.crystal, c.channel, c.mode).value);
    record(check("limit_fully_coherent_delta_100_sigma", dev < 1e-4, dev, 1e-4));
  }
  {
    const double dev = rel_dev(rate_gaussian_engine(0.0, 0.0, c.pump, c.crystal, {1e-20, c.channel.z}, c.mode).value,
                               rate_gaussian_engine(0.0, 0.0, c.pump, c.crystal, {0.0, c.channel.z}, c.mode).value);
    record(check("limit_no_turbulence_cn2_1e-20", dev < 1e-4, dev, 1e-4));
  }

  // Parity, positivity and imaginary residue of the trusted path.
  {
    double parity = 0.0;
    double residue = 0.0;
    double min_value = INFINITY;
    for (double m : {0.5, 1.0, 2.0, 3.0}) {
      const auto plus = rate_gaussian_engine(0.0, m * w, c.pump, c.crystal, c.channel, c.mode);
      const auto minus = rate_gaussian_engine(0.0, -m * w, c.pump, c.crystal, c.channel, c.mode);
      parity = std::max(parity, rel_dev(minus.value, plus.value));
      residue = std::max({residue, plus.relative_imag_residue(), minus.relative_imag_residue()});
      min_value = std::min({min_value, plus.value, minus.value});
    }
    record(check("parity_x1_0", parity < 1e-9, parity, 1e-9));
    record(check("imag_residue", residue <= kImagResidueBound, residue, kImagResidueBound));
    record(check("nonnegative", min_value >= 0.0, min_value, 0.0));
  }

  // Closed form as printed against the engine over the scan presets.
  json scenarios = json::array();
  for (const char* fig : {"fig2", "fig3", "fig4"}) {
    const auto preset = figure_preset(fig, c.pump, c.crystal);
    for (const auto& s : preset.scenarios) {
      json entry;
      entry["figure"] = fig;
      entry["label"] = s.label;
      entry["delta"] = delta_json(s.pump.delta);
      entry["z_m"] = s.channel.z;
      entry["cn2_m_to_minus_2_3"] = s.channel.cn2;
      entry["fingerprint"] = params_fingerprint(canonical_parameters(s.pump, s.crystal, s.channel));
      const DetectorScan scan = scenario_config(c, s).resolve_scan();
      entry["samples"] = scan.n_points;
      try {
        std::vector<double> devs;
        double parity = 0.0;
        for (int i = 0; i < scan.n_points; ++i) {
          const double x2 = scan.sample(i);
          const double engine = rate_gaussian_engine(0.0, x2, s.pump, s.crystal, s.channel, c.mode).value;
          const double printed = rate_closed_form_as_printed(0.0, x2, s.pump, s.crystal, s.channel).value;
          const double mirrored = rate_closed_form_as_printed(0.0, -x2, s.pump, s.crystal, s.channel).value;
          devs.push_back(std::abs(printed - engine) / engine);
          parity = std::max(parity, std::abs(printed - mirrored) / std::max(std::abs(printed), std::abs(mirrored)));
        }
        entry["status"] = "ok";
        entry["max_relative_deviation"] = number_or_null(*std::max_element(devs.begin(), devs.end()));
        entry["mean_relative_deviation"] =
            number_or_null(std::accumulate(devs.begin(), devs.end(), 0.0) / static_cast<double>(devs.size()));
        entry["parity_violation"] = number_or_null(parity);
      } catch (const SingularConstantError& ex) {
        entry["status"] = "singular";
        entry["error"] = ex.what();
        entry["max_relative_deviation"] = nullptr;
        entry["mean_relative_deviation"] = nullptr;
        entry["parity_violation"] = nullptr;
      }
      scenarios.push_back(std::move(entry));
    }
  }

  json report;
  report["schema_version"] = kSchemaVersion;
  report["kind"] = "validation_report";
  report["tool"] = "biphoton";
  report["tool_version"] = tool_version();
  report["fingerprint"] = params_fingerprint(canonical_parameters(c.pump, c.crystal, c.channel));
  report["parameters"] = parameters_json(c, nullptr);
  report["profile_half_width_m"] = w;
  report["checks"] = checks;
  report["all_passed"] = all_passed;
  report["discrepancy"] = {{"reference_method", "engine"},
                           {"diagnostic_method", "closed-form"},
                           {"note", "deviations are documented, not thresholded"},
                           {"scenarios", scenarios}};

  CommandResult result;
  const auto path = c.out_dir / "validation_report.json";
  write_file(path, dump(report));
  result.files.push_back(path);
  result.exit_code = all_passed ? kExitOk : kExitValidationFailure;
  return result;
}

std::vector<std::string> check_report_schema(const json& report) {
  std::vector<std::string> problems;
  auto need = [&](const json& obj, const char* key, json::value_t type, const std::string& where) {
    if (!obj.contains(key)) {
      problems.push_back(where + "." + key + " missing");
      return false;
    }
    const auto t = obj[key].type();
    const bool numeric_ok = type == json::value_t::number_float &&
                            (t == json::value_t::number_integer || t == json::value_t::number_unsigned);
    if (t != type && !numeric_ok && !(t == json::value_t::null && type == json::value_t::number_float)) {
      problems.push_back(where + "." + key + " has wrong type");
      return false;
    }
    return true;
  };
  if (!report.is_object()) return {"report is not an object"};
  if (report.value("schema_version", 0) != kSchemaVersion) problems.push_back("schema_version != 1");
  need(report, "checks", json::value_t::array, "report");
  need(report, "all_passed", json::value_t::boolean, "report");
  if (need(report, "discrepancy", json::value_t::object, "report")) {
    const auto& d = report["discrepancy"];
    if (need(d, "scenarios", json::value_t::array, "discrepancy")) {
      if (d["scenarios"].empty()) problems.push_back("discrepancy.scenarios is empty");
      for (const auto& s : d["scenarios"]) {
        need(s, "label", json::value_t::string, "scenario");
        need(s, "fingerprint", json::value_t::string, "scenario");
        need(s, "status", json::value_t::string, "scenario");
        need(s, "max_relative_deviation", json::value_t::number_float, "scenario");
        need(s, "mean_relative_deviation", json::value_t::number_float, "scenario");
        need(s, "parity_violation", json::value_t::number_float, "scenario");
      }
    }
  }
  if (report.contains("checks") && report["checks"].is_array()) {
    for (const auto& c : report["checks"]) {
      need(c, "name", json::value_t::string, "check");
      need(c, "passed", json::value_t::boolean, "check");
    }
  }
  return problems;
}

}  // namespace biphoton
