#include "pemfc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "pemfc/errors.hpp"

namespace pemfc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& field, const fs::path& path, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
  return v;
}

// Parses a CSV with the exact expected header; returns rows of doubles.
std::vector<std::vector<double>> read_csv(const fs::path& path, const std::string& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw IoError(path.string() + ": expected header '" + header + "', got '" + line + "'");
  const std::size_t n_cols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_double(line.substr(start, comma - start), path, line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != n_cols)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_database(const fs::path& dir, const Database& db) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::string pol = "t_h,j_A_cm2,u_V\n";
  std::string rohm = "t_h,j_A_cm2,r_ohm_cm2\n";
  for (const auto& c : db.curves) {
    for (const auto& [j, u] : c.points)
      pol += format_double(c.t) + "," + format_double(j) + "," + format_double(u) + "\n";
    for (const auto& [j, r] : c.r_ohm_profile)
      rohm += format_double(c.t) + "," + format_double(j) + "," + format_double(r) + "\n";
  }
  std::string volt = "t_h,u_V\n";
  for (std::size_t t = 0; t < db.voltage_hourly.size(); ++t)
    volt += std::to_string(t) + "," + format_double(db.voltage_hourly[t]) + "\n";

  write_file_atomic(dir / "polarization.csv", pol);
  write_file_atomic(dir / "r_ohm.csv", rohm);
  write_file_atomic(dir / "voltage.csv", volt);
}

Database read_database(const fs::path& dir) {
  Database db;

  // Polarization rows arrive grouped by characterization time, times ascending.
  const auto pol = read_csv(dir / "polarization.csv", "t_h,j_A_cm2,u_V");
  for (const auto& row : pol) {
    if (db.curves.empty() || db.curves.back().t != row[0]) {
      if (!db.curves.empty() && row[0] < db.curves.back().t)
        throw IoError("polarization.csv: characterization times out of order");
      db.curves.push_back(PolarizationCurve{row[0], {}, {}});
    }
    db.curves.back().points.emplace_back(row[1], row[2]);
  }

  const auto rohm = read_csv(dir / "r_ohm.csv", "t_h,j_A_cm2,r_ohm_cm2");
  std::size_t ci = 0;
  for (const auto& row : rohm) {
    while (ci < db.curves.size() && db.curves[ci].t != row[0]) ++ci;
    if (ci == db.curves.size())
      throw IoError("r_ohm.csv: time " + format_double(row[0]) + " has no polarization block");
    db.curves[ci].r_ohm_profile.emplace_back(row[1], row[2]);
  }
  for (const auto& c : db.curves)
    if (c.r_ohm_profile.empty())
      throw IoError("r_ohm.csv: no profile for characterization at t = " + format_double(c.t));

  const auto volt = read_csv(dir / "voltage.csv", "t_h,u_V");
  db.voltage_hourly.reserve(volt.size());
  for (std::size_t i = 0; i < volt.size(); ++i) {
    if (volt[i][0] != static_cast<double>(i))
      throw IoError("voltage.csv: expected contiguous hourly rows starting at 0");
    db.voltage_hourly.push_back(volt[i][1]);
  }
  if (db.voltage_hourly.empty()) throw IoError("voltage.csv: no rows");
  return db;
}

void write_truth_json(const fs::path& path, const GroundTruth& gt) {
  json j;
  j["laws"] = {{"a0", gt.a0}, {"k0", gt.k0}, {"an", gt.an}, {"kn", gt.kn},
               {"r_ohm0", gt.r_ohm0}, {"k_ohm", gt.k_ohm}, {"beta", gt.beta}};
  j["jlim"] = {{"a", gt.jlim_a}, {"b", gt.jlim_b}, {"c", gt.jlim_c},
               {"t_break", gt.t_break}, {"accel", gt.jlim_accel}};
  j["constants"] = {{"F", gt.constants.F}, {"R", gt.constants.R}, {"T", gt.constants.T},
                    {"alpha", gt.constants.alpha}, {"E_rev", gt.constants.E_rev}};
  j["conditions"] = {{"temperature_c", gt.conditions.temperature_c},
                     {"pressure_bara", gt.conditions.pressure_bara},
                     {"rh_air_pct", gt.conditions.rh_air_pct},
                     {"stoich_air", gt.conditions.stoich_air},
                     {"rh_h2_pct", gt.conditions.rh_h2_pct},
                     {"stoich_h2", gt.conditions.stoich_h2}};
  j["sampling"] = {{"t_max", gt.t_max}, {"cadence", gt.cadence}, {"horizon", gt.horizon},
                   {"j_op", gt.j_op}, {"n_grid", gt.n_grid}, {"grid_lo", gt.grid_lo},
                   {"grid_hi_frac", gt.grid_hi_frac}};
  write_file_atomic(path, j.dump(2) + "\n");
}

namespace {

// Strict field access: every key must exist and every key must be consumed.
double take(json& obj, const char* key, const fs::path& path) {
  if (!obj.contains(key)) throw IoError(path.string() + ": missing key '" + key + "'");
  const double v = obj[key].get<double>();
  obj.erase(key);
  return v;
}

void expect_empty(const json& obj, const char* section, const fs::path& path) {
  if (!obj.empty())
    throw IoError(path.string() + ": unknown key '" + obj.begin().key() + "' in " + section);
}

}  // namespace

GroundTruth read_truth_json(const fs::path& path) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  GroundTruth gt;
  try {
    json laws = root.at("laws");
    gt.a0 = take(laws, "a0", path);
    gt.k0 = take(laws, "k0", path);
    gt.an = take(laws, "an", path);
    gt.kn = take(laws, "kn", path);
    gt.r_ohm0 = take(laws, "r_ohm0", path);
    gt.k_ohm = take(laws, "k_ohm", path);
    gt.beta = take(laws, "beta", path);
    expect_empty(laws, "laws", path);

    json jl = root.at("jlim");
    gt.jlim_a = take(jl, "a", path);
    gt.jlim_b = take(jl, "b", path);
    gt.jlim_c = take(jl, "c", path);
    gt.t_break = take(jl, "t_break", path);
    gt.jlim_accel = take(jl, "accel", path);
    expect_empty(jl, "jlim", path);

    json c = root.at("constants");
    gt.constants.F = take(c, "F", path);
    gt.constants.R = take(c, "R", path);
    gt.constants.T = take(c, "T", path);
    gt.constants.alpha = take(c, "alpha", path);
    gt.constants.E_rev = take(c, "E_rev", path);
    expect_empty(c, "constants", path);

    json oc = root.at("conditions");
    gt.conditions.temperature_c = take(oc, "temperature_c", path);
    gt.conditions.pressure_bara = take(oc, "pressure_bara", path);
    gt.conditions.rh_air_pct = take(oc, "rh_air_pct", path);
    gt.conditions.stoich_air = take(oc, "stoich_air", path);
    gt.conditions.rh_h2_pct = take(oc, "rh_h2_pct", path);
    gt.conditions.stoich_h2 = take(oc, "stoich_h2", path);
    expect_empty(oc, "conditions", path);

    json s = root.at("sampling");
    gt.t_max = take(s, "t_max", path);
    gt.cadence = take(s, "cadence", path);
    gt.horizon = static_cast<int>(take(s, "horizon", path));
    gt.j_op = take(s, "j_op", path);
    gt.n_grid = static_cast<int>(take(s, "n_grid", path));
    gt.grid_lo = take(s, "grid_lo", path);
    gt.grid_hi_frac = take(s, "grid_hi_frac", path);
    expect_empty(s, "sampling", path);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return gt;
}

}  // namespace pemfc
