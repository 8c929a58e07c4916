#pragma once

#include <filesystem>
#include <string>

#include "biphoton/scenarios.hpp"

namespace biphoton {

inline constexpr int kSchemaVersion = 1;

std::string tool_version();

// "x2_m,rate_raw,rate_norm" rows with shortest round-trip numbers.
std::string profile_csv(const CoincidenceProfile& profile);
// "cn2_m_to_minus_2_3,rate_norm" rows.
std::string robustness_csv(const RobustnessCurve& curve);

// Writes atomically enough for our purposes (temp file + rename). Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& contents);
// Creates the directory if needed and checks it is writable. Throws IoError.
void prepare_output_dir(const std::filesystem::path& dir);

}  // namespace biphoton
