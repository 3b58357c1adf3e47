#pragma once

#include <string>

#include <json.hpp>

#include "pemfc/prognosis.hpp"
#include "pemfc/synthdata.hpp"

namespace pemfc::cli {

// One JSON document configures every command. All sections and keys are
// optional (defaults below); unknown keys are rejected so a typo cannot
// silently fall back to a default.
//
// {
//   "constants":  { "F", "R", "T", "alpha", "E_rev" },
//   "conditions": { "temperature_c", "pressure_bara", "rh_air_pct",
//                   "stoich_air", "rh_h2_pct", "stoich_h2" },
//   "prognosis":  { "t_n", "j_op", "eol_fraction" },
//   "scenario":   { "mu", "s", "n_scenarios", "t_max", "tau", "lambda0" },
//   "noise":      { "r_meas", "q_rel", "p0_rel" },
//   "truth":      { "laws": { "a0", "k0", "an", "kn", "r_ohm0", "k_ohm", "beta" },
//                   "jlim": { "a", "b", "c", "t_break", "accel" },
//                   "sampling": { "t_max", "cadence", "horizon", "j_op",
//                                 "n_grid", "grid_lo", "grid_hi_frac" } },
//   "paths":      { "database", "out" },
//   "seed":       0
// }
struct RunConfig {
  PrognosisConfig prognosis;   // constants + scenario + noise folded in
  OperatingConditions conditions;
  GroundTruth truth;           // synth plant; constants/conditions mirrored in
  std::string database_dir;
  std::string out_dir;
};

// Defaults when path is empty; ValidationError on unknown keys or bad types.
RunConfig load_run_config(const std::string& path);

// Full effective configuration, defaults included, for the run manifest.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace pemfc::cli
