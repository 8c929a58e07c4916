// biphoton: coincidence-rate scans and turbulence sweeps from the command line.
//
//   biphoton scan     [--preset figN] [--config file] [--out dir] [--<key> value ...]
//   biphoton sweep    [--preset fig5] ...
//   biphoton validate ...
//   biphoton figure   <fig2|fig3|fig4|fig5> ...
//
// Exit codes: 0 ok, 1 validation failure, 2 usage/config error, 3 I/O error.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biphoton/commands.hpp"
#include "biphoton/errors.hpp"

namespace {

void print_nested(const std::exception& e, int depth = 0) {
  std::cerr << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "error: " << e.what() << "\n";
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_nested(inner, depth + 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace biphoton;

  CLI::App app{"Coincidence rates of SPDC photon pairs through Kolmogorov turbulence"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string method;
  std::string kernel;
  std::string rel_tol;
  unsigned threads = 0;
  bool threads_set = false;
  bool overwrite = false;
  app.add_option("--config", config_path, "Key/value config file or emitted *.meta.json")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--method", method, "Evaluator")->check(CLI::IsMember({"engine", "closed-form", "quadrature"}));
  app.add_option("--kernel", kernel, "Turbulence kernel form")->check(CLI::IsMember({"cross-term", "as-printed"}));
  app.add_option("--rel-tol", rel_tol, "Quadrature relative tolerance");
  app.add_option_function<unsigned>("--threads", [&](unsigned t) { threads = t, threads_set = true; },
                                    "Worker threads (0 = all cores); output does not depend on it");
  app.add_flag("--overwrite", overwrite, "Replace output produced from different parameters");

  // Every remaining config key is also a flag of the same name.
  std::map<std::string, std::string> overrides;
  for (const auto& key : config_keys()) {
    if (key == "out" || key == "method" || key == "kernel" || key == "rel_tol" || key == "threads") continue;
    app.add_option_function<std::string>("--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                         "Override config key '" + key + "'");
  }

  std::optional<std::string> preset;
  auto* scan = app.add_subcommand("scan", "Coincidence rate versus idler detector position");
  scan->add_option_function<std::string>("--preset", [&](const std::string& v) { preset = v; }, "fig2 | fig3 | fig4");
  auto* sweep = app.add_subcommand("sweep", "Normalised on-axis rate versus Cn2");
  sweep->add_option_function<std::string>("--preset", [&](const std::string& v) { preset = v; }, "fig5");
  auto* validate = app.add_subcommand("validate", "Oracle, limit and closed-form reconciliation checks");
  std::string figure_name;
  auto* figure = app.add_subcommand("figure", "Emit every series of a figure preset");
  figure->add_option("name", figure_name, "fig2 | fig3 | fig4 | fig5")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ConfigText text = config_path.empty() ? ConfigText{} : ConfigText::load(config_path);
    for (const auto& [key, value] : overrides) text.set(key, value, "--" + key);
    if (!out_dir.empty()) text.set("out", out_dir, "--out");
    if (!method.empty()) text.set("method", method, "--method");
    if (!kernel.empty()) text.set("kernel", kernel, "--kernel");
    if (!rel_tol.empty()) text.set("rel_tol", rel_tol, "--rel-tol");
    if (threads_set) text.set("threads", std::to_string(threads), "--threads");
    const RunConfig config = RunConfig::from_text(text);

    CommandOptions options{preset, overwrite};
    CommandResult result;
    if (*scan) {
      result = cmd_scan(config, options);
    } else if (*sweep) {
      result = cmd_sweep(config, options);
    } else if (*validate) {
      result = cmd_validate(config);
    } else if (*figure) {
      result = cmd_figure(figure_name, config);
    }
    for (const auto& f : result.files) std::cout << f.string() << "\n";
    if (result.exit_code == kExitValidationFailure) std::cerr << "validation failed; see the report\n";
    return result.exit_code;
  } catch (const IoError& e) {
    print_nested(e);
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    print_nested(e);
    return kExitIo;
  } catch (const ParseError& e) {
    print_nested(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    print_nested(e);
    return kExitUsage;
  } catch (const DomainError& e) {
    print_nested(e);
    return kExitUsage;
  } catch (const std::exception& e) {
    print_nested(e);
    return kExitValidationFailure;
  }
}
