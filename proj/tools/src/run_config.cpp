#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include "pemfc/errors.hpp"

namespace pemfc::cli {

using nlohmann::json;

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
}

// Consume-and-check accessors: every recognized key is erased, and whatever
// remains afterwards is unknown by construction.
template <typename T>
void take(json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config: key '") + key + "' has the wrong type");
  }
  obj.erase(key);
}

void expect_empty(const json& obj, const char* section) {
  if (!obj.empty())
    throw ValidationError(std::string("config: unknown key '") + obj.begin().key() + "' in " +
                          section);
}

json take_section(json& root, const char* key) {
  if (!root.contains(key)) return json::object();
  if (!root[key].is_object())
    throw ValidationError(std::string("config: section '") + key + "' must be an object");
  json section = root[key];
  root.erase(key);
  return section;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;

  json root = parse_file(path);
  if (!root.is_object()) throw ValidationError("config: top level must be an object");

  json c = take_section(root, "constants");
  take(c, "F", cfg.prognosis.constants.F);
  take(c, "R", cfg.prognosis.constants.R);
  take(c, "T", cfg.prognosis.constants.T);
  take(c, "alpha", cfg.prognosis.constants.alpha);
  take(c, "E_rev", cfg.prognosis.constants.E_rev);
  expect_empty(c, "constants");

  json oc = take_section(root, "conditions");
  take(oc, "temperature_c", cfg.conditions.temperature_c);
  take(oc, "pressure_bara", cfg.conditions.pressure_bara);
  take(oc, "rh_air_pct", cfg.conditions.rh_air_pct);
  take(oc, "stoich_air", cfg.conditions.stoich_air);
  take(oc, "rh_h2_pct", cfg.conditions.rh_h2_pct);
  take(oc, "stoich_h2", cfg.conditions.stoich_h2);
  expect_empty(oc, "conditions");

  json p = take_section(root, "prognosis");
  take(p, "t_n", cfg.prognosis.t_n);
  take(p, "j_op", cfg.prognosis.j_op);
  take(p, "eol_fraction", cfg.prognosis.eol_fraction);
  expect_empty(p, "prognosis");

  json s = take_section(root, "scenario");
  take(s, "mu", cfg.prognosis.scenario.mu);
  take(s, "s", cfg.prognosis.scenario.s);
  take(s, "n_scenarios", cfg.prognosis.scenario.n_scenarios);
  take(s, "t_max", cfg.prognosis.scenario.t_max);
  take(s, "tau", cfg.prognosis.scenario.tau);
  take(s, "lambda0", cfg.prognosis.scenario.lambda0);
  expect_empty(s, "scenario");

  json n = take_section(root, "noise");
  take(n, "r_meas", cfg.prognosis.r_meas);
  take(n, "q_rel", cfg.prognosis.q_rel);
  take(n, "p0_rel", cfg.prognosis.p0_rel);
  expect_empty(n, "noise");

  json t = take_section(root, "truth");
  json tl = take_section(t, "laws");
  take(tl, "a0", cfg.truth.a0);
  take(tl, "k0", cfg.truth.k0);
  take(tl, "an", cfg.truth.an);
  take(tl, "kn", cfg.truth.kn);
  take(tl, "r_ohm0", cfg.truth.r_ohm0);
  take(tl, "k_ohm", cfg.truth.k_ohm);
  take(tl, "beta", cfg.truth.beta);
  expect_empty(tl, "truth.laws");
  json tj = take_section(t, "jlim");
  take(tj, "a", cfg.truth.jlim_a);
  take(tj, "b", cfg.truth.jlim_b);
  take(tj, "c", cfg.truth.jlim_c);
  take(tj, "t_break", cfg.truth.t_break);
  take(tj, "accel", cfg.truth.jlim_accel);
  expect_empty(tj, "truth.jlim");
  json ts = take_section(t, "sampling");
  take(ts, "t_max", cfg.truth.t_max);
  take(ts, "cadence", cfg.truth.cadence);
  take(ts, "horizon", cfg.truth.horizon);
  take(ts, "j_op", cfg.truth.j_op);
  take(ts, "n_grid", cfg.truth.n_grid);
  take(ts, "grid_lo", cfg.truth.grid_lo);
  take(ts, "grid_hi_frac", cfg.truth.grid_hi_frac);
  expect_empty(ts, "truth.sampling");
  expect_empty(t, "truth");

  json paths = take_section(root, "paths");
  take(paths, "database", cfg.database_dir);
  take(paths, "out", cfg.out_dir);
  expect_empty(paths, "paths");

  take(root, "seed", cfg.prognosis.scenario.seed);
  expect_empty(root, "the top-level document");

  // The plant shares the physical constants and operating conditions.
  cfg.truth.constants = cfg.prognosis.constants;
  cfg.truth.conditions = cfg.conditions;
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  const auto& pc = cfg.prognosis.constants;
  j["constants"] = {{"F", pc.F}, {"R", pc.R}, {"T", pc.T}, {"alpha", pc.alpha}, {"E_rev", pc.E_rev}};
  j["conditions"] = {{"temperature_c", cfg.conditions.temperature_c},
                     {"pressure_bara", cfg.conditions.pressure_bara},
                     {"rh_air_pct", cfg.conditions.rh_air_pct},
                     {"stoich_air", cfg.conditions.stoich_air},
                     {"rh_h2_pct", cfg.conditions.rh_h2_pct},
                     {"stoich_h2", cfg.conditions.stoich_h2}};
  j["prognosis"] = {{"t_n", cfg.prognosis.t_n},
                    {"j_op", cfg.prognosis.j_op},
                    {"eol_fraction", cfg.prognosis.eol_fraction}};
  j["scenario"] = {{"mu", cfg.prognosis.scenario.mu},
                   {"s", cfg.prognosis.scenario.s},
                   {"n_scenarios", cfg.prognosis.scenario.n_scenarios},
                   {"t_max", cfg.prognosis.scenario.t_max},
                   {"tau", cfg.prognosis.scenario.tau},
                   {"lambda0", cfg.prognosis.scenario.lambda0}};
  j["noise"] = {{"r_meas", cfg.prognosis.r_meas},
                {"q_rel", cfg.prognosis.q_rel},
                {"p0_rel", cfg.prognosis.p0_rel}};
  j["truth"] = {{"laws",
                 {{"a0", cfg.truth.a0},
                  {"k0", cfg.truth.k0},
                  {"an", cfg.truth.an},
                  {"kn", cfg.truth.kn},
                  {"r_ohm0", cfg.truth.r_ohm0},
                  {"k_ohm", cfg.truth.k_ohm},
                  {"beta", cfg.truth.beta}}},
                {"jlim",
                 {{"a", cfg.truth.jlim_a},
                  {"b", cfg.truth.jlim_b},
                  {"c", cfg.truth.jlim_c},
                  {"t_break", cfg.truth.t_break},
                  {"accel", cfg.truth.jlim_accel}}},
                {"sampling",
                 {{"t_max", cfg.truth.t_max},
                  {"cadence", cfg.truth.cadence},
                  {"horizon", cfg.truth.horizon},
                  {"j_op", cfg.truth.j_op},
                  {"n_grid", cfg.truth.n_grid},
                  {"grid_lo", cfg.truth.grid_lo},
                  {"grid_hi_frac", cfg.truth.grid_hi_frac}}}};
  j["paths"] = {{"database", cfg.database_dir}, {"out", cfg.out_dir}};
  j["seed"] = cfg.prognosis.scenario.seed;
  return j;
}

}  // namespace pemfc::cli
