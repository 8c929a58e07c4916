#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/config.hpp"

namespace biphoton {

enum ExitCode : int { kExitOk = 0, kExitValidationFailure = 1, kExitUsage = 2, kExitIo = 3 };

// Bad command usage that is not a config parse problem (unknown preset,
// refusing to overwrite output from different parameters, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
};

struct CommandOptions {
  std::optional<std::string> preset;
  bool overwrite = false;
};

// scan: <out>/scan.csv + scan.meta.json, or one CSV/meta pair per preset scenario.
CommandResult cmd_scan(const RunConfig& config, const CommandOptions& options = {});
// sweep: one CSV per coherence setting plus sweep.meta.json.
CommandResult cmd_sweep(const RunConfig& config, const CommandOptions& options = {});
// validate: trusted-path checks plus the closed-form discrepancy report in
// <out>/validation_report.json. Exit 1 iff a trusted-path check fails.
CommandResult cmd_validate(const RunConfig& config);
// figure <name>: every series of a preset plus <name>.manifest.json.
CommandResult cmd_figure(const std::string& name, const RunConfig& config);

// Metadata document for one emitted series.
nlohmann::json series_metadata(const std::string& command, const RunConfig& config, const DetectorScan* scan,
                               const std::string& fingerprint);

// Light structural check of a validation report; returns the problems found.
std::vector<std::string> check_report_schema(const nlohmann::json& report);

}  // namespace biphoton
