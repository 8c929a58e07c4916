#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "biphoton/commands.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/output.hpp"

namespace biphoton {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("biphoton_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BIPHOTON_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_scan(const fs::path& out) {
  auto c = RunConfig::from_text(ConfigText::parse("delta = 0.0876mm\nx2_min = -60m\nx2_max = 60m\nn_points = 9\n"));
  c.out_dir = out;
  return c;
}

TEST(ScanCommand, WritesCsvAndMetadata) {
  const auto dir = fresh_dir("scan");
  const auto r = cmd_scan(small_scan(dir));
  EXPECT_EQ(r.exit_code, kExitOk);
  const std::string csv = read_file(dir / "scan.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x2_m,rate_raw,rate_norm");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
  const auto meta = nlohmann::json::parse(read_file(dir / "scan.meta.json"));
  EXPECT_EQ(meta["schema_version"], kSchemaVersion);
  EXPECT_EQ(meta["command"], "scan");
  EXPECT_EQ(meta["fingerprint"].get<std::string>().size(), 16u);
}

TEST(ScanCommand, MetadataReproducesRun) {
  const auto dir = fresh_dir("replay");
  cmd_scan(small_scan(dir));
  const auto replay = RunConfig::from_text(ConfigText::load(dir / "scan.meta.json"));
  const auto again = fresh_dir("replay2");
  auto c = replay;
  c.out_dir = again;
  cmd_scan(c);
  EXPECT_EQ(read_file(dir / "scan.csv"), read_file(again / "scan.csv"));
  const auto a = nlohmann::json::parse(read_file(dir / "scan.meta.json"));
  const auto b = nlohmann::json::parse(read_file(again / "scan.meta.json"));
  EXPECT_EQ(a["fingerprint"], b["fingerprint"]);
}

TEST(ScanCommand, OverwriteGuard) {
  const auto dir = fresh_dir("guard");
  cmd_scan(small_scan(dir));
  EXPECT_NO_THROW(cmd_scan(small_scan(dir)));
  auto other = small_scan(dir);
  other.channel.cn2 = 4e-14;
  EXPECT_THROW(cmd_scan(other), UsageError);
  EXPECT_NO_THROW(cmd_scan(other, CommandOptions{.overwrite = true}));
}

TEST(SweepCommand, OneSeriesPerCoherence) {
  const auto dir = fresh_dir("sweep");
  auto c = RunConfig::from_text(ConfigText::parse("cn2_grid = 1e-15, 1e-14, 5e-14\ndeltas = inf, 0.0417mm\n"));
  c.out_dir = dir;
  const auto r = cmd_sweep(c);
  const auto meta = nlohmann::json::parse(read_file(dir / "sweep.meta.json"));
  ASSERT_EQ(meta["series"].size(), 2u);
  for (const auto& s : meta["series"]) {
    const std::string csv = read_file(dir / s["file"].get<std::string>());
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "cn2_m_to_minus_2_3,rate_norm");
  }
  EXPECT_EQ(r.files.size(), 3u);
}

TEST(FigureCommand, ManifestListsEverySeries) {
  const auto dir = fresh_dir("figure");
  auto c = RunConfig::from_text(ConfigText::parse("n_points = 5\n"));
  c.out_dir = dir;
  cmd_figure("fig3", c);
  const auto manifest = nlohmann::json::parse(read_file(dir / "fig3.manifest.json"));
  ASSERT_EQ(manifest["series"].size(), 8u);
  for (const auto& s : manifest["series"]) EXPECT_TRUE(fs::exists(dir / s["file"].get<std::string>()));
  EXPECT_THROW(cmd_figure("fig7", c), UsageError);
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  EXPECT_EQ(run_cli("scan --out " + dir.string() + " --n_points 5"), 0);
  EXPECT_EQ(run_cli("scan --out " + dir.string() + " --cn2 -1"), 2);
  EXPECT_EQ(run_cli("scan --out " + dir.string() + " --sigma 1parsec"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("figure fig9 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("scan --config /nonexistent/run.cfg"), 2);
  EXPECT_EQ(run_cli("scan --n_points 5 --out /proc/biphoton_cannot_write"), 3);
  EXPECT_EQ(run_cli("scan --out " + dir.string() + " --n_points 5 --cn2 2e-14"), 2);
  EXPECT_EQ(run_cli("scan --out " + dir.string() + " --n_points 5 --cn2 2e-14 --overwrite"), 0);
}

TEST(ValidateCommand, ReportSchema) {
  const auto dir = fresh_dir("validate");
  auto c = RunConfig::from_text(ConfigText::parse("delta = 0.0876mm\n"));
  c.out_dir = dir;
  const auto r = cmd_validate(c);
  const auto report = nlohmann::json::parse(read_file(dir / "validation_report.json"));
  EXPECT_TRUE(check_report_schema(report).empty());
  bool any_failed = false;
  for (const auto& check : report["checks"]) any_failed = any_failed || !check["passed"].get<bool>();
  EXPECT_EQ(r.exit_code, any_failed ? kExitValidationFailure : kExitOk);
}

}  // namespace
}  // namespace biphoton
