#pragma once

#include <filesystem>
#include <string>

#include "pemfc/synthdata.hpp"

namespace pemfc {

// Database directory layout (UTF-8, LF, '.' decimal, header row mandatory):
//   polarization.csv  t_h,j_A_cm2,u_V          one block of rows per characterization
//   r_ohm.csv         t_h,j_A_cm2,r_ohm_cm2    matching blocks
//   voltage.csv       t_h,u_V                  hourly, t = 0..horizon
//   truth.json        planted coefficients (written by synth, optional on read)

// Shortest round-trip representation; integral values print without exponent.
std::string format_double(double v);

// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

void write_database(const std::filesystem::path& dir, const Database& db);
Database read_database(const std::filesystem::path& dir);

void write_truth_json(const std::filesystem::path& path, const GroundTruth& gt);
GroundTruth read_truth_json(const std::filesystem::path& path);

}  // namespace pemfc
