#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pemfc/errors.hpp"
#include "pemfc/io.hpp"
#include "pemfc/prognosis.hpp"
#include "run_config.hpp"

namespace pemfc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Opts {
  std::string config_path;
  std::string database;
  std::string out;
  int tn = 0;
  int scenarios = 0;
  std::uint64_t seed = 0;
  bool compare_model1 = false;
  bool dump_scenarios = false;

  CLI::Option* tn_opt = nullptr;
  CLI::Option* scenarios_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

// Shared flags; the command callbacks apply them on top of the config file.
std::shared_ptr<Opts> add_common(CLI::App& cmd, bool with_database) {
  auto opts = std::make_shared<Opts>();
  cmd.add_option("--config", opts->config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  if (with_database)
    cmd.add_option("database", opts->database, "database directory (overrides paths.database)");
  cmd.add_option("--out", opts->out, "output directory (overrides paths.out)");
  return opts;
}

RunConfig resolve(const Opts& opts) {
  RunConfig cfg = load_run_config(opts.config_path);
  if (!opts.database.empty()) cfg.database_dir = opts.database;
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (opts.tn_opt && opts.tn_opt->count() > 0) cfg.prognosis.t_n = opts.tn;
  if (opts.scenarios_opt && opts.scenarios_opt->count() > 0)
    cfg.prognosis.scenario.n_scenarios = opts.scenarios;
  if (opts.seed_opt && opts.seed_opt->count() > 0) cfg.prognosis.scenario.seed = opts.seed;
  if (cfg.out_dir.empty())
    throw ValidationError("no output directory: pass --out or set paths.out in the config");
  return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  fs::path out(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  return out;
}

Database open_database(const RunConfig& cfg) {
  if (cfg.database_dir.empty())
    throw ValidationError("no database directory: pass it as an argument or set paths.database");
  return read_database(cfg.database_dir);
}

void write_manifest(const fs::path& out, const std::string& command, const RunConfig& cfg,
                    json flags = json::object()) {
  json m;
  m["command"] = command;
  m["config"] = config_to_json(cfg);
  if (!flags.empty()) m["flags"] = flags;
  write_file_atomic(out / "manifest.json", m.dump(2) + "\n");
}

// Identification over the characterizations at or before t_n (all of them
// when t_n < 0).
std::pair<std::vector<PolarizationCurve>, std::vector<FitResult>> identify_window(
    const Database& db, const PhysicalConstants& constants, int t_n) {
  std::vector<PolarizationCurve> curves;
  for (const auto& c : db.curves)
    if (t_n < 0 || c.t <= static_cast<double>(t_n)) curves.push_back(c);
  if (curves.empty()) throw ValidationError("no characterizations in the requested window");
  return {curves, fit_curve_set(curves, constants)};
}

std::string csv_field(double v) { return format_double(v); }

json metrics_to_json(const Metrics& m) {
  json j;
  j["mape"] = m.mape;
  j["ape"] = m.ape;
  json rmse = json::array();
  for (const auto& [w, v] : m.rmse_by_horizon) rmse.push_back({w, v});
  j["rmse_by_horizon"] = rmse;
  return j;
}

void run_synth(const Opts& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path out = ensure_out_dir(cfg);
  const Database db = generate_database(cfg.truth);
  write_database(out, db);
  write_truth_json(out / "truth.json", cfg.truth);
  write_manifest(out, "synth", cfg);
}

void run_predict(const Opts& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path out = ensure_out_dir(cfg);
  const Database db = open_database(cfg);

  const PrognosisConfig& pcfg = cfg.prognosis;
  const TrainOutput trained = train(db, pcfg);

  ScenarioConfig scfg = pcfg.scenario;
  scfg.t_n = pcfg.t_n;
  scfg.j_op = pcfg.j_op;
  const LearningCurve learning{trained.spline, trained.detection, trained.jlim_hourly};
  const std::vector<JlimScenario> scenarios = generate_scenarios(learning, scfg);
  const PrognosisResult result = predict_with_scenarios(trained, pcfg, scenarios);

  // quantiles.csv
  std::string q = "t_h,min_V,q05_V,q25_V,median_V,q75_V,q95_V,max_V,mean_V\n";
  for (const auto& r : result.quantiles) {
    q += csv_field(r.t) + "," + csv_field(r.min) + "," + csv_field(r.q05) + "," +
         csv_field(r.q25) + "," + csv_field(r.median) + "," + csv_field(r.q75) + "," +
         csv_field(r.q95) + "," + csv_field(r.max) + "," + csv_field(r.mean) + "\n";
  }
  write_file_atomic(out / "quantiles.csv", q);

  // ruls.csv; t_eol and rul stay empty when the scenario never reaches EOL
  std::string ruls = "scenario,t_c_h,lambda,t_eol_h,rul_h\n";
  for (const auto& o : result.outcomes) {
    ruls += std::to_string(o.scenario) + "," + csv_field(o.t_c) + "," + csv_field(o.lambda) + ",";
    if (o.eol_reached)
      ruls += std::to_string(o.t_eol) + "," + csv_field(o.rul);
    else
      ruls += ",";
    ruls += "\n";
  }
  write_file_atomic(out / "ruls.csv", ruls);

  // ekf_trace.csv over the learning window
  std::string trace = "k,t_h,j0_A_cm2,jn_A_cm2,r_ohm_cm2,predicted_u_V,innovation_V\n";
  for (const auto& r : trained.filter.trace) {
    trace += std::to_string(r.k) + "," + csv_field(r.t) + "," + csv_field(r.j0) + "," +
             csv_field(r.jn) + "," + csv_field(r.r_ohm) + "," + csv_field(r.predicted_v) + "," +
             csv_field(r.innovation) + "\n";
  }
  write_file_atomic(out / "ekf_trace.csv", trace);

  if (opts.dump_scenarios) {
    const fs::path sdir = out / "scenarios";
    std::error_code ec;
    fs::create_directories(sdir, ec);
    if (ec) throw IoError("cannot create " + sdir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::string s = "t_h,jlim_A_cm2\n";
      for (std::size_t h = 0; h < scenarios[i].trajectory.size(); ++h)
        s += std::to_string(pcfg.t_n + static_cast<int>(h) + 1) + "," +
             csv_field(scenarios[i].trajectory[h]) + "\n";
      char name[32];
      std::snprintf(name, sizeof(name), "scenario_%04zu.csv", i);
      write_file_atomic(sdir / name, s);
    }
  }

  // metrics.json; error metrics only when the database carries its truth
  json mj;
  mj["t_n"] = pcfg.t_n;
  mj["n_scenarios"] = static_cast<int>(result.outcomes.size());
  mj["n_eol_reached"] = result.n_eol_reached;
  mj["detected"] = trained.detection.detected;
  if (trained.detection.detected) mj["t_c_detected"] = trained.detection.t_c;
  mj["rul"] = {{"median", result.rul_median}, {"mean", result.rul_mean}};

  const bool have_truth = fs::exists(fs::path(cfg.database_dir) / "truth.json");
  std::optional<double> rul_true;
  if (have_truth) {
    const auto eol_true =
        estimate_eol(db.voltage_hourly, db.voltage_hourly.front(), pcfg.eol_fraction);
    if (eol_true && *eol_true >= pcfg.t_n) {
      rul_true = estimate_rul(static_cast<double>(*eol_true), static_cast<double>(pcfg.t_n));
      mj["truth"] = {{"t_eol", *eol_true}, {"rul", *rul_true}};

      // Median trajectory against the true future voltage, as far as both reach.
      std::size_t n_cmp = result.quantiles.size();
      n_cmp = std::min(n_cmp, db.voltage_hourly.size() - static_cast<std::size_t>(pcfg.t_n) - 1);
      std::vector<double> pred(n_cmp), truth_v(n_cmp);
      for (std::size_t h = 0; h < n_cmp; ++h) {
        pred[h] = result.quantiles[h].median;
        truth_v[h] = db.voltage_hourly[static_cast<std::size_t>(pcfg.t_n) + 1 + h];
      }
      mj["p1p2"] = metrics_to_json(metrics(pred, truth_v, result.rul_median, *rul_true));
      mj["p1p2"]["ape_mean"] =
          metrics(pred, truth_v, result.rul_mean, *rul_true).ape;
    }
  }

  if (opts.compare_model1) {
    // Same filter, but the future jlim comes from the smooth quadratic-
    // exponential law instead of the sampled rupture scenarios.
    JlimScenario m1;
    m1.t_c = static_cast<double>(pcfg.t_n);
    m1.lambda = 1.0;
    m1.trajectory.resize(static_cast<std::size_t>(scfg.t_max - scfg.t_n));
    const double floor = 1.05 * pcfg.j_op;
    bool floored = false;
    for (std::size_t h = 0; h < m1.trajectory.size(); ++h) {
      const double t = static_cast<double>(pcfg.t_n) + static_cast<double>(h + 1);
      double v = eval_laws(trained.laws, t).jlim;
      if (floored || v < floor) {
        floored = true;
        v = floor;
      }
      m1.trajectory[h] = v;
    }
    const PrognosisResult r1 = predict_with_scenarios(trained, pcfg, {m1});
    json cmp;
    cmp["rul"] = r1.rul_median;
    if (rul_true && r1.n_eol_reached > 0)
      cmp["ape"] = 100.0 * std::fabs((*rul_true - r1.rul_median) / *rul_true);
    mj["model1"] = cmp;
  }

  write_file_atomic(out / "metrics.json", mj.dump(2) + "\n");
  write_manifest(out, "predict", cfg,
                 {{"compare_model1", opts.compare_model1},
                  {"dump_scenarios", opts.dump_scenarios}});
}

void run_identify(const Opts& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path out = ensure_out_dir(cfg);
  const Database db = open_database(cfg);
  const int t_n = (opts.tn_opt && opts.tn_opt->count() > 0) ? opts.tn : -1;
  const auto [curves, fits] = identify_window(db, cfg.prognosis.constants, t_n);

  std::string p = "t_h,j0_A_cm2,jn_A_cm2,beta,jlim_A_cm2,r_ohm_cm2,rmse_V,n_iter,converged\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& f = fits[i];
    p += csv_field(curves[i].t) + "," + csv_field(f.params.j0) + "," + csv_field(f.params.jn) +
         "," + csv_field(f.params.beta) + "," + csv_field(f.params.jlim) + "," +
         csv_field(f.params.r_ohm) + "," + csv_field(f.rmse) + "," +
         std::to_string(f.n_iterations) + "," + (f.converged ? "1" : "0") + "\n";
  }
  write_file_atomic(out / "params.csv", p);
  write_manifest(out, "identify", cfg);
}

void run_fitlaws(const Opts& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path out = ensure_out_dir(cfg);
  const Database db = open_database(cfg);
  const int t_n = (opts.tn_opt && opts.tn_opt->count() > 0) ? opts.tn : -1;
  const auto [curves, fits] = identify_window(db, cfg.prognosis.constants, t_n);
  if (curves.size() < 2) throw ValidationError("fitlaws: need at least 2 characterizations");

  const double t_max = static_cast<double>(cfg.prognosis.scenario.t_max);
  std::vector<std::pair<double, double>> s_j0, s_jn, s_rohm, s_jlim;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double x = normalize_time(curves[i].t, t_max);
    s_j0.emplace_back(x, fits[i].params.j0);
    s_jn.emplace_back(x, fits[i].params.jn);
    s_rohm.emplace_back(x, interp_r_ohm(curves[i], cfg.prognosis.j_op));
    s_jlim.emplace_back(x, fits[i].params.jlim);
  }

  json lj;
  std::tie(lj["a0"], lj["k0"]) = fit_exponential_law(s_j0, LawSign::Decay);
  std::tie(lj["an"], lj["kn"]) = fit_exponential_law(s_jn, LawSign::Growth);
  {
    const auto [r0, kr] = fit_linear_law(s_rohm);
    lj["r_ohm0"] = r0;
    lj["k_ohm"] = kr;
  }
  lj["beta"] = fits.front().params.beta;
  lj["t_max"] = t_max;
  {
    const JlimModel1 m1 = fit_jlim_model1(s_jlim);
    lj["jlim_model1"] = {{"a1", m1.a1}, {"k1", m1.k1}};
  }
  try {
    const Model2Fit m2 = fit_jlim_model2(s_jlim);
    lj["jlim_model2"] = {{"a1", m2.model.a1}, {"k1", m2.model.k1}, {"a2", m2.model.a2},
                         {"k2", m2.model.k2}, {"t_c", m2.model.t_c}, {"rmse", m2.rmse}};
  } catch (const std::runtime_error&) {
    lj["jlim_model2"] = nullptr;  // breakpoint model not identifiable on this window
  }

  write_file_atomic(out / "laws.json", lj.dump(2) + "\n");
  write_manifest(out, "fitlaws", cfg);
}

void run_detect(const Opts& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path out = ensure_out_dir(cfg);
  const Database db = open_database(cfg);
  const int t_n = (opts.tn_opt && opts.tn_opt->count() > 0)
                      ? opts.tn
                      : static_cast<int>(db.curves.back().t);
  const auto [curves, fits] = identify_window(db, cfg.prognosis.constants, t_n);

  std::vector<std::pair<double, double>> knots;
  for (std::size_t i = 0; i < curves.size(); ++i)
    knots.emplace_back(curves[i].t, fits[i].params.jlim);
  const std::vector<double> series = interpolate_jlim_hourly(knots, t_n);
  const ChangeDetection det =
      detect_change(series, cfg.prognosis.scenario.tau, cfg.prognosis.scenario.lambda0);

  json dj;
  dj["t_n"] = t_n;
  dj["tau"] = cfg.prognosis.scenario.tau;
  dj["lambda0"] = cfg.prognosis.scenario.lambda0;
  dj["detected"] = det.detected;
  if (det.detected)
    dj["t_c"] = det.t_c;
  else
    dj["t_c"] = nullptr;
  write_file_atomic(out / "detection.json", dj.dump(2) + "\n");
  write_manifest(out, "detect", cfg);
}

}  // namespace

void register_synth(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("synth", "generate the synthetic aging database");
  auto opts = add_common(*cmd, false);
  cmd->callback([opts] { run_synth(*opts); });
}

void register_predict(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("predict", "train on [0, t_n] and predict voltage and RUL");
  auto opts = add_common(*cmd, true);
  opts->tn_opt = cmd->add_option("--tn", opts->tn, "learning horizon, h");
  opts->scenarios_opt = cmd->add_option("--scenarios", opts->scenarios, "number of jlim scenarios");
  opts->seed_opt = cmd->add_option("--seed", opts->seed, "scenario RNG seed");
  cmd->add_flag("--compare-model1", opts->compare_model1,
                "also run the smooth-law jlim extrapolation and report both APEs");
  cmd->add_flag("--dump-scenarios", opts->dump_scenarios,
                "write each sampled jlim trajectory under <out>/scenarios/");
  cmd->callback([opts] { run_predict(*opts); });
}

void register_identify(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("identify", "fit quasi-static parameters per characterization");
  auto opts = add_common(*cmd, true);
  opts->tn_opt = cmd->add_option("--tn", opts->tn, "only use characterizations at or before this hour");
  cmd->callback([opts] { run_identify(*opts); });
}

void register_fitlaws(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("fitlaws", "fit the aging laws to identified parameters");
  auto opts = add_common(*cmd, true);
  opts->tn_opt = cmd->add_option("--tn", opts->tn, "only use characterizations at or before this hour");
  cmd->callback([opts] { run_fitlaws(*opts); });
}

void register_detect(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("detect", "interpolate jlim and scan for the breakpoint");
  auto opts = add_common(*cmd, true);
  opts->tn_opt = cmd->add_option("--tn", opts->tn, "learning horizon, h (default: last characterization)");
  cmd->callback([opts] { run_detect(*opts); });
}

}  // namespace pemfc::cli
