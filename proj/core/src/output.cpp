#include "biphoton/output.hpp"

#include <fstream>
#include <system_error>

#include "biphoton/errors.hpp"

#ifndef BIPHOTON_VERSION
#define BIPHOTON_VERSION "0.0.0"
#endif

namespace biphoton {

std::string tool_version() { return BIPHOTON_VERSION; }

std::string profile_csv(const CoincidenceProfile& profile) {
  std::string out = "x2_m,rate_raw,rate_norm\n";
  for (std::size_t i = 0; i < profile.x2.size(); ++i) {
    out += format_double(profile.x2[i]);
    out += ',';
    out += format_double(profile.raw[i]);
    out += ',';
    out += format_double(profile.normalized[i]);
    out += '\n';
  }
  return out;
}

std::string robustness_csv(const RobustnessCurve& curve) {
  std::string out = "cn2_m_to_minus_2_3,rate_norm\n";
  for (std::size_t i = 0; i < curve.cn2.size(); ++i) {
    out += format_double(curve.cn2[i]);
    out += ',';
    out += format_double(curve.normalized_peak[i]);
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out.flush()) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
  const auto probe = dir / ".biphoton_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace biphoton
