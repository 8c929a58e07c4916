// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <Eigen/QR>

#include "biphoton/commands.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/output.hpp"
#include "biphoton/gaussian_integral.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/scenarios.hpp"

using namespace biphoton;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Setup {
  PumpParams pump;
  CrystalParams crystal;
  ChannelParams channel;
};

Setup reference_point() {
  Setup s;
  s.pump.delta = CoherenceLength::finite(0.0876e-3);
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240917);
  double worst = 0.0;
  bool nonnegative = true;
  for (int i = 0; i < 20; ++i) {
    Setup s;
    s.pump.sigma = log_uniform(rng, 0.2e-3, 2e-3);
    const double delta = log_uniform(rng, 0.02e-3, 1e-3);
    s.pump.delta = i % 5 == 0 ? CoherenceLength::infinite() : CoherenceLength::finite(delta);
    s.channel.cn2 = log_uniform(rng, 1e-15, 1e-13);
    s.channel.z = log_uniform(rng, 1e3, 20e3);
    s.crystal.gamma = log_uniform(rng, 0.2, 5.0);
    s.crystal.length = log_uniform(rng, 0.5e-3, 5e-3);
    const double w = profile_half_width(0.0, s.pump, s.crystal, s.channel.z);
    for (double x2 : {0.0, w, 2.0 * w}) {
      const auto e = rate_gaussian_engine(0.0, x2, s.pump, s.crystal, s.channel);
      const auto q = rate_quadrature(0.0, x2, s.pump, s.crystal, s.channel, TurbulenceKernelMode::CrossTerm, 1e-4);
      worst = std::max(worst, rel(e.value, q.value));
      nonnegative = nonnegative && e.value >= 0.0 && q.value >= 0.0 &&
                    e.relative_imag_residue() <= kImagResidueBound;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.passed = worst < 1e-3 && seconds < 600.0 && nonnegative;
  o.detail = "max rel dev " + sci(worst) + " (< 1e-3), " + sci(seconds) + " s (< 600 s), nonnegative " +
             (nonnegative ? "yes" : "no");
  return o;
}

ComplexQuadraticForm random_form(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> eig(0.3, 3.0);
  const Eigen::Matrix4d q = Eigen::Matrix4d::NullaryExpr([&] { return n01(rng); });
  const Eigen::Matrix4d basis = Eigen::HouseholderQR<Eigen::Matrix4d>(q).householderQ();
  const Eigen::Vector4d lambdas(eig(rng), eig(rng), eig(rng), eig(rng));
  Eigen::Matrix4d im = Eigen::Matrix4d::NullaryExpr([&] { return n01(rng); });
  ComplexQuadraticForm f(4);
  Eigen::Matrix4d re = basis * lambdas.asDiagonal() * basis.transpose();
  re = 0.5 * (re + re.transpose()).eval();
  f.matrix = re.cast<cdouble>() +
             cdouble(0, 0.5) * (im + im.transpose()).cast<cdouble>();
  for (int i = 0; i < 4; ++i) f.vector(i) = cdouble(n01(rng), n01(rng));
  return f;
}

Outcome engine_self_tests() {
  const double pi = std::numbers::pi;
  double worst_identity = 0.0;
  {
    ComplexQuadraticForm f(1);
    f.matrix(0, 0) = 1.0;
    worst_identity = std::max(worst_identity, std::abs(gaussian_integral(f).value - std::sqrt(pi)) / std::sqrt(pi));
    f.vector(0) = 2.0;
    const double e = std::sqrt(pi) * std::exp(1.0);
    worst_identity = std::max(worst_identity, std::abs(gaussian_integral(f).value - e) / e);
    ComplexQuadraticForm g(2);
    g.matrix(0, 0) = 1.0;
    g.matrix(1, 1) = 2.0;
    const double v = pi / std::sqrt(2.0);
    worst_identity = std::max(worst_identity, std::abs(gaussian_integral(g).value - v) / v);
  }
  std::mt19937_64 rng(4242);
  double worst_random = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto f = random_form(rng);
    const cdouble exact = gaussian_integral(f).value;
    const cdouble numeric = integrate_quadratic_form(f, {.rel_tol = 1e-4}).value;
    worst_random = std::max(worst_random, std::abs(numeric - exact) / std::abs(exact));
  }
  Outcome o;
  o.passed = worst_identity < 1e-12 && worst_random < 1e-3;
  o.detail = "identities " + sci(worst_identity) + " (< 1e-12), random 4D forms " + sci(worst_random) + " (< 1e-3)";
  return o;
}

Outcome limit_consistency() {
  const Setup p0 = reference_point();
  Setup coherent = p0;
  coherent.pump.delta = CoherenceLength::infinite();
  Setup wide = p0;
  wide.pump.delta = CoherenceLength::finite(100.0 * p0.pump.sigma);
  Setup calm = p0;
  calm.channel.cn2 = 0.0;
  Setup faint = p0;
  faint.channel.cn2 = 1e-20;

  // Each comparison is sampled on the profile of its own reference path.
  auto rate = [](const Setup& s, double x2) {
    return rate_gaussian_engine(0.0, x2, s.pump, s.crystal, s.channel).value;
  };
  const double w_coherent = profile_half_width(0.0, coherent.pump, coherent.crystal, coherent.channel.z);
  const double w_calm = profile_half_width(0.0, calm.pump, calm.crystal, calm.channel.z);
  double coherent_dev = 0.0, turbulence_dev = 0.0;
  for (double f : {0.0, 1.0, 2.0}) {
    coherent_dev = std::max(coherent_dev, rel(rate(wide, f * w_coherent), rate(coherent, f * w_coherent)));
    turbulence_dev = std::max(turbulence_dev, rel(rate(faint, f * w_calm), rate(calm, f * w_calm)));
  }
  Outcome o;
  o.passed = coherent_dev < 1e-4 && turbulence_dev < 1e-4;
  o.detail = "delta=100 sigma vs fully coherent " + sci(coherent_dev) + " (< 1e-4), cn2=1e-20 vs 0 " +
             sci(turbulence_dev) + " (< 1e-4)";
  return o;
}

double profile_peak(const PumpParams& pump, const CrystalParams& crystal, const ChannelParams& channel) {
  const auto scan = default_scan(pump, crystal, channel.z);
  const auto p = scan_profile(scan, pump, crystal, channel, Method::GaussianEngine);
  return *std::max_element(p.raw.begin(), p.raw.end());
}

Outcome fig2_trend() {
  PumpParams pump;
  const CrystalParams crystal;
  bool ordered = true;
  std::vector<double> drops;
  std::ostringstream detail;
  for (double z : {1e3, 5e3, 7e3, 20e3}) {
    const double weak = profile_peak(pump, crystal, ChannelParams{1e-14, z});
    const double strong = profile_peak(pump, crystal, ChannelParams{5e-14, z});
    ordered = ordered && strong < weak;
    drops.push_back((weak - strong) / weak);
    detail << "drop@" << z / 1e3 << "km " << sci(drops.back()) << ", ";
  }
  Outcome o;
  o.passed = ordered && drops.back() > drops.front();
  detail << "peaks ordered " << (ordered ? "yes" : "no");
  o.detail = detail.str();
  return o;
}

Outcome fig5_trend() {
  const auto grid = log_grid(1e-15, 5e-14, 10);
  std::vector<double> drops;
  bool decreasing = true;
  std::ostringstream detail;
  for (auto delta : {CoherenceLength::infinite(), CoherenceLength::finite(0.0876e-3),
                     CoherenceLength::finite(0.0417e-3), CoherenceLength::finite(0.0253e-3)}) {
    PumpParams pump;
    pump.delta = delta;
    const auto curve = robustness_curve(grid, 20e3, pump, CrystalParams{}, Method::GaussianEngine);
    if (delta.is_infinite()) {
      for (std::size_t i = 1; i < grid.size(); ++i)
        decreasing = decreasing && curve.normalized_peak[i] < curve.normalized_peak[i - 1];
    }
    drops.push_back(curve.normalized_peak.front() - curve.normalized_peak.back());
    detail << sci(drops.back()) << " ";
  }
  bool ordered = true;
  for (std::size_t i = 1; i < drops.size(); ++i) ordered = ordered && drops[i - 1] > drops[i];
  Outcome o;
  o.passed = decreasing && ordered;
  o.detail = "drops (inf, 0.0876, 0.0417, 0.0253 mm): " + detail.str() + "; coherent curve decreasing " +
             (decreasing ? "yes" : "no");
  return o;
}

Outcome symmetry_positivity() {
  double worst_parity = 0.0, worst_imag = 0.0;
  bool nonnegative = true;
  int profiles = 0;
  for (auto name : {"fig2", "fig3", "fig4"}) {
    for (const auto& s : figure_preset(name).scenarios) {
      const auto scan = default_scan(s.pump, s.crystal, s.channel.z);
      for (int i = 0; i < scan.n_points; ++i) {
        const auto a = rate_gaussian_engine(0.0, scan.sample(i), s.pump, s.crystal, s.channel);
        const auto b = rate_gaussian_engine(0.0, -scan.sample(i), s.pump, s.crystal, s.channel);
        nonnegative = nonnegative && a.value >= 0.0;
        worst_imag = std::max(worst_imag, a.relative_imag_residue());
        if (a.value > 0.0) worst_parity = std::max(worst_parity, rel(b.value, a.value));
      }
      ++profiles;
    }
  }
  Outcome o;
  o.passed = worst_parity < 1e-9 && nonnegative && worst_imag <= kImagResidueBound;
  o.detail = std::to_string(profiles) + " profiles, parity " + sci(worst_parity) + " (< 1e-9), imag residue " +
             sci(worst_imag) + " (<= 1e-8), nonnegative " + (nonnegative ? "yes" : "no");
  return o;
}

Outcome discrepancy_report() {
  const fs::path dir = fs::temp_directory_path() / "biphoton_acceptance_validate";
  fs::remove_all(dir);
  RunConfig config = RunConfig::from_text(ConfigText::parse("delta = 0.0876mm\n"));
  config.out_dir = dir;
  cmd_validate(config);
  const fs::path report_path = dir / "validation_report.json";
  Outcome o;
  if (!fs::exists(report_path)) {
    o.passed = false;
    o.detail = "validation_report.json missing";
    return o;
  }
  std::ifstream in(report_path);
  const auto report = nlohmann::json::parse(in);
  const auto problems = check_report_schema(report);
  const auto& scenarios = report["discrepancy"]["scenarios"];
  o.passed = problems.empty() && scenarios.size() == 24;
  o.detail = std::to_string(scenarios.size()) + " scenarios reconciled, " + std::to_string(problems.size()) +
             " schema problems";
  for (const auto& p : problems) o.detail += "; " + p;
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BIPHOTON_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "biphoton_acceptance_fig5";
  fs::remove_all(root);
  const std::vector<std::string> threads{"1", "1", "4", "16"};
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  Outcome o;
  for (std::size_t r = 0; r < threads.size(); ++r) {
    const fs::path dir = root / ("run" + std::to_string(r));
    if (run_cli("figure fig5 --threads " + threads[r] + " --out " + dir.string()) != 0) {
      o.passed = false;
      o.detail = "figure fig5 failed with --threads " + threads[r];
      return o;
    }
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".csv") files.emplace_back(entry.path().filename(), slurp(entry.path()));
    }
    std::sort(files.begin(), files.end());
    runs.push_back(std::move(files));
  }
  bool identical = !runs.front().empty();
  for (const auto& r : runs) identical = identical && r == runs.front();
  o.passed = identical;
  o.detail = std::to_string(runs.front().size()) + " CSVs compared across " + std::to_string(runs.size()) +
             " runs (threads 1,1,4,16): " + (identical ? "byte-identical" : "differ");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"gaussian engine self-tests", engine_self_tests},
      {"limit consistency", limit_consistency},
      {"fixed-detector trend over distance", fig2_trend},
      {"robustness ordering by pump coherence", fig5_trend},
      {"symmetry and positivity", symmetry_positivity},
      {"closed-form discrepancy report", discrepancy_report},
      {"determinism of figure output", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
