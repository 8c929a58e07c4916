#include "biphoton/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

bool is_length_key(const std::string& key) {
  static const std::vector<std::string> lengths{"wavelength_p", "sigma", "crystal_length", "wavelength_s",
                                                "wavelength_i", "z", "x1", "x2_min", "x2_max"};
  return std::find(lengths.begin(), lengths.end(), key) != lengths.end();
}

std::string format_coherence(const CoherenceLength& c) {
  return c.is_infinite() ? "inf" : format_quantity(c.meters(), Unit::Meter);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "wavelength_p", "sigma",  "delta",  "amplitude", "crystal_length", "gamma",   "wavelength_s",
      "wavelength_i", "cn2",    "z",      "x1",        "x2_min",         "x2_max",  "n_points",
      "method",       "kernel", "rel_tol", "threads",  "out",            "cn2_grid", "cn2_min",
      "cn2_max",      "cn2_points", "deltas"};
  return keys;
}

ConfigText ConfigText::parse(std::string_view text, const std::string& origin) {
  ConfigText cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  return cfg;
}

ConfigText ConfigText::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.contains("config") || !doc["config"].is_object()) {
      throw ParseError(path.string() + ": metadata has no 'config' object");
    }
    ConfigText cfg;
    for (const auto& [key, value] : doc["config"].items()) {
      if (!value.is_string()) throw ParseError(path.string() + ": config." + key + " must be a string");
      cfg.set(key, value.get<std::string>(), path.string() + ":config." + key);
    }
    return cfg;
  }
  return parse(buffer.str(), path.string());
}

void ConfigText::set(const std::string& key, const std::string& value, const std::string& origin) {
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ParseError(origin + ": unknown key '" + key + "'");
  }
  entries_[key] = value;
  origins_[key] = origin;
}

RunConfig RunConfig::from_text(const ConfigText& text) {
  RunConfig cfg;
  auto where = [&](const std::string& key) {
    auto it = text.origins_.find(key);
    return (it == text.origins_.end() ? std::string("<config>") : it->second) + ": " + key;
  };

  for (const auto& [key, value] : text.entries_) {
    try {
      if (is_length_key(key)) {
        const Quantity q = parse_quantity(value);
        if (q.unit == Unit::None) throw ParseError("missing length unit in '" + value + "'");
        if (key == "wavelength_p") cfg.pump.wavelength = q.value;
        else if (key == "sigma") cfg.pump.sigma = q.value;
        else if (key == "crystal_length") cfg.crystal.length = q.value;
        else if (key == "wavelength_s") cfg.crystal.wavelength_signal = q.value;
        else if (key == "wavelength_i") cfg.crystal.wavelength_idler = q.value;
        else if (key == "z") cfg.channel.z = q.value;
        else if (key == "x1") cfg.x1 = q.value;
        else if (key == "x2_min") cfg.x2_min = q.value;
        else if (key == "x2_max") cfg.x2_max = q.value;
      } else if (key == "delta") {
        cfg.pump.delta = parse_coherence(value);
      } else if (key == "deltas") {
        for (const auto& item : split_list(value)) cfg.deltas.push_back(parse_coherence(item));
      } else if (key == "amplitude" || key == "gamma" || key == "cn2" || key == "rel_tol") {
        const Quantity q = parse_quantity(value);
        if (q.unit != Unit::None) throw ParseError("'" + key + "' is dimensionless, got '" + value + "'");
        if (key == "amplitude") cfg.pump.amplitude = q.value;
        else if (key == "gamma") cfg.crystal.gamma = q.value;
        else if (key == "cn2") cfg.channel.cn2 = q.value;
        else cfg.rel_tol = q.value;
      } else if (key == "cn2_grid") {
        for (const auto& item : split_list(value)) {
          const Quantity q = parse_quantity(item);
          if (q.unit != Unit::None) throw ParseError("cn2 values are dimensionless, got '" + item + "'");
          cfg.cn2_grid.push_back(q.value);
        }
      } else if (key == "n_points" || key == "threads" || key == "cn2_points") {
        int n = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc{} || ptr != value.data() + value.size() || n < 0) {
          throw ParseError("expected a non-negative integer, got '" + value + "'");
        }
        if (key == "n_points") cfg.n_points = n;
        else if (key == "threads") cfg.threads = static_cast<unsigned>(n);
      } else if (key == "method") {
        const auto m = method_from_string(value);
        if (!m) throw ParseError("method must be engine, closed-form or quadrature, got '" + value + "'");
        cfg.method = *m;
      } else if (key == "kernel") {
        if (value == "cross-term") cfg.mode = TurbulenceKernelMode::CrossTerm;
        else if (value == "as-printed") cfg.mode = TurbulenceKernelMode::AsPrinted;
        else throw ParseError("kernel must be cross-term or as-printed, got '" + value + "'");
      } else if (key == "out") {
        cfg.out_dir = value;
      }
    } catch (const ParseError& e) {
      throw ParseError(where(key) + ": " + e.what());
    } catch (const DomainError& e) {
      throw ParseError(where(key) + ": " + e.what());
    }
  }

  const auto& e = text.entries_;
  const bool has_min = e.count("cn2_min") != 0;
  const bool has_max = e.count("cn2_max") != 0;
  if (has_min || has_max || e.count("cn2_points") != 0) {
    if (!cfg.cn2_grid.empty()) throw ParseError(where("cn2_grid") + ": give either cn2_grid or cn2_min/cn2_max");
    if (!has_min || !has_max) throw ParseError(where("cn2_min") + ": cn2_min and cn2_max must both be set");
    try {
      const double lo = parse_quantity(e.at("cn2_min")).value;
      const double hi = parse_quantity(e.at("cn2_max")).value;
      int n = 10;
      if (auto it = e.find("cn2_points"); it != e.end()) n = std::stoi(it->second);
      cfg.cn2_grid = log_grid(lo, hi, n);
    } catch (const std::exception& ex) {
      throw ParseError(where("cn2_min") + ": " + ex.what());
    }
  }
  for (std::size_t i = 1; i < cfg.cn2_grid.size(); ++i) {
    if (!(cfg.cn2_grid[i] > cfg.cn2_grid[i - 1])) {
      throw ParseError(where("cn2_grid") + ": grid must be strictly increasing");
    }
  }

  // Domain validation happens at parse time so bad overrides never reach an evaluator.
  try {
    cfg.pump.validate();
  } catch (const DomainError& ex) {
    throw ParseError(std::string("pump: ") + ex.what());
  }
  try {
    cfg.crystal.validate();
  } catch (const DomainError& ex) {
    throw ParseError(std::string("crystal: ") + ex.what());
  }
  try {
    cfg.channel.validate();
  } catch (const DomainError& ex) {
    throw ParseError(std::string("channel: ") + ex.what());
  }
  if (cfg.n_points < 2) throw ParseError(where("n_points") + ": need at least 2 points");
  if (!(cfg.rel_tol >= 1e-6 && cfg.rel_tol <= 1e-2)) throw ParseError(where("rel_tol") + ": must lie in [1e-6, 1e-2]");
  if (cfg.x2_min.has_value() != cfg.x2_max.has_value()) {
    throw ParseError(where(cfg.x2_min ? "x2_min" : "x2_max") + ": x2_min and x2_max must be given together");
  }
  if (cfg.x2_min && !(*cfg.x2_min < *cfg.x2_max)) throw ParseError(where("x2_min") + ": x2_min must be < x2_max");
  for (double c : cfg.cn2_grid) {
    if (!(c >= 0.0)) throw ParseError(where("cn2_grid") + ": cn2 values must be >= 0");
  }
  try {
    (void)build_quadratic_form(0.0, 0.0, cfg.pump, cfg.crystal, cfg.channel, cfg.mode);
  } catch (const DegenerateIntegrandError& ex) {
    throw ParseError(ex.what());
  }
  return cfg;
}

DetectorScan RunConfig::resolve_scan() const {
  if (x2_min && x2_max) return DetectorScan{x1, *x2_min, *x2_max, n_points};
  const double w = profile_half_width(x1, pump, crystal, channel.z, mode);
  return DetectorScan{x1, -5.0 * w, 5.0 * w, n_points};
}

std::vector<CoherenceLength> RunConfig::sweep_deltas() const {
  return deltas.empty() ? std::vector<CoherenceLength>{pump.delta} : deltas;
}

std::vector<double> RunConfig::sweep_grid() const {
  return cn2_grid.empty() ? log_grid(1e-15, 5e-14, 10) : cn2_grid;
}

std::map<std::string, std::string> RunConfig::to_entries(const DetectorScan* resolved_scan) const {
  std::map<std::string, std::string> out;
  out["wavelength_p"] = format_quantity(pump.wavelength, Unit::Meter);
  out["sigma"] = format_quantity(pump.sigma, Unit::Meter);
  out["delta"] = format_coherence(pump.delta);
  out["amplitude"] = format_double(pump.amplitude);
  out["crystal_length"] = format_quantity(crystal.length, Unit::Meter);
  out["gamma"] = format_double(crystal.gamma);
  out["wavelength_s"] = format_quantity(crystal.signal_wavelength(pump), Unit::Meter);
  out["wavelength_i"] = format_quantity(crystal.idler_wavelength(pump), Unit::Meter);
  out["cn2"] = format_double(channel.cn2);
  out["z"] = format_quantity(channel.z, Unit::Meter);
  out["x1"] = format_quantity(x1, Unit::Meter);
  if (resolved_scan) {
    out["x2_min"] = format_quantity(resolved_scan->x2_min, Unit::Meter);
    out["x2_max"] = format_quantity(resolved_scan->x2_max, Unit::Meter);
  } else if (x2_min && x2_max) {
    out["x2_min"] = format_quantity(*x2_min, Unit::Meter);
    out["x2_max"] = format_quantity(*x2_max, Unit::Meter);
  }
  out["n_points"] = std::to_string(n_points);
  out["method"] = std::string(to_string(method));
  out["kernel"] = std::string(to_string(mode));
  out["rel_tol"] = format_double(rel_tol);
  if (!cn2_grid.empty()) {
    std::vector<std::string> items;
    for (double c : cn2_grid) items.push_back(format_double(c));
    out["cn2_grid"] = join(items);
  }
  if (!deltas.empty()) {
    std::vector<std::string> items;
    for (const auto& d : deltas) items.push_back(format_coherence(d));
    out["deltas"] = join(items);
  }
  return out;
}

}  // namespace biphoton
