#include "pemfc/prognosis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pemfc/errors.hpp"

namespace pemfc {

namespace {

double quantile_type7(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return (m % 2 == 1) ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

TrainOutput train(const Database& database, const PrognosisConfig& cfg) {
  if (cfg.t_n <= 0) throw ValidationError("train: t_n must be > 0");
  if (!(cfg.eol_fraction > 0.0 && cfg.eol_fraction < 1.0))
    throw ValidationError("train: eol_fraction must lie in (0, 1)");
  if (static_cast<int>(database.voltage_hourly.size()) <= cfg.t_n)
    throw ValidationError("train: hourly voltage does not cover [0, t_n]");
  validate(cfg.constants);

  // Restrict to the learning window.
  std::vector<PolarizationCurve> curves;
  for (const auto& c : database.curves)
    if (c.t <= static_cast<double>(cfg.t_n)) curves.push_back(c);
  if (curves.size() < 3) throw ValidationError("train: need at least 3 characterizations in [0, t_n]");

  TrainOutput out;
  out.measured_v.assign(database.voltage_hourly.begin(),
                        database.voltage_hourly.begin() + cfg.t_n + 1);

  out.fits = fit_curve_set(curves, cfg.constants);

  // Law fitting on normalized characterization times.
  const double t_max = static_cast<double>(cfg.scenario.t_max);
  std::vector<std::pair<double, double>> s_j0, s_jn, s_rohm, s_jlim, knots;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double x = normalize_time(curves[i].t, t_max);
    s_j0.emplace_back(x, out.fits[i].params.j0);
    s_jn.emplace_back(x, out.fits[i].params.jn);
    s_rohm.emplace_back(x, interp_r_ohm(curves[i], cfg.j_op));
    s_jlim.emplace_back(x, out.fits[i].params.jlim);
    knots.emplace_back(curves[i].t, out.fits[i].params.jlim);
  }
  std::tie(out.laws.a0, out.laws.k0) = fit_exponential_law(s_j0, LawSign::Decay);
  std::tie(out.laws.an, out.laws.kn) = fit_exponential_law(s_jn, LawSign::Growth);
  std::tie(out.laws.r_ohm0, out.laws.k_ohm) = fit_linear_law(s_rohm);
  out.laws.jlim_model = fit_jlim_model1(s_jlim);  // comparison hook; prediction uses scenarios
  out.laws.t_max = t_max;

  out.spline = fit_constrained_spline(knots);
  out.jlim_hourly = interpolate_jlim_hourly(knots, cfg.t_n);
  out.detection = detect_change(out.jlim_hourly, cfg.scenario.tau, cfg.scenario.lambda0);

  out.transition = {out.laws.k0, out.laws.kn, out.laws.k_ohm, 1.0 / t_max};
  out.obs.constants = cfg.constants;
  out.obs.beta = out.fits.front().params.beta;  // shared across curves after the set fit

  const LawValues v0 = eval_laws(out.laws, 0.0);
  out.noise.theta0 = {v0.j0, v0.jn, v0.r_ohm};
  out.noise.R = cfg.r_meas;
  out.noise.Q = (cfg.q_rel * out.noise.theta0).array().square().matrix().asDiagonal();
  out.noise.P0 = (cfg.p0_rel * out.noise.theta0).array().square().matrix().asDiagonal();

  out.filter = run_filter(out.measured_v, out.jlim_hourly, out.transition, out.noise, cfg.j_op,
                          out.obs);
  out.final_state = out.filter.final_state;
  return out;
}

PrognosisResult predict_with_scenarios(const TrainOutput& trained, const PrognosisConfig& cfg,
                                       const std::vector<JlimScenario>& scenarios) {
  if (scenarios.empty()) throw ValidationError("predict_with_scenarios: no scenarios");
  const std::size_t horizon = static_cast<std::size_t>(cfg.scenario.t_max - cfg.t_n);
  for (const auto& sc : scenarios)
    if (sc.trajectory.size() != horizon)
      throw ValidationError("predict_with_scenarios: trajectory length mismatch");

  // The state recursion does not depend on the scenario, so one prediction-only
  // pass provides theta for every future hour.
  std::vector<Eigen::Vector3d> theta(horizon);
  {
    EkfState state = trained.final_state;
    for (std::size_t h = 0; h < horizon; ++h) {
      state = predict(state, trained.transition, trained.noise.Q);
      theta[h] = state.theta;
    }
  }

  PrognosisResult res;
  const std::size_t n_sc = scenarios.size();
  res.voltage.assign(n_sc, {});
  std::vector<bool> ok(n_sc, true);
  std::size_t n_ok = 0;
  for (std::size_t s = 0; s < n_sc; ++s) {
    auto& v = res.voltage[s];
    v.resize(horizon);
    try {
      for (std::size_t h = 0; h < horizon; ++h)
        v[h] = observation(theta[h], scenarios[s].trajectory[h], cfg.j_op, trained.obs);
      ++n_ok;
    } catch (const NumericalError&) {
      ok[s] = false;  // singular observation: drop the scenario from the ensemble
      v.clear();
    }
  }
  if (n_ok == 0)
    throw NumericalError("predict_with_scenarios: observation singular in every scenario");

  // Hourly ensemble statistics over the surviving scenarios.
  res.quantiles.resize(horizon);
  std::vector<double> column;
  column.reserve(n_ok);
  for (std::size_t h = 0; h < horizon; ++h) {
    column.clear();
    double sum = 0.0;
    for (std::size_t s = 0; s < n_sc; ++s) {
      if (!ok[s]) continue;
      column.push_back(res.voltage[s][h]);
      sum += res.voltage[s][h];
    }
    std::sort(column.begin(), column.end());
    QuantileRow& q = res.quantiles[h];
    q.t = static_cast<double>(cfg.t_n) + static_cast<double>(h + 1);
    q.min = column.front();
    q.q05 = quantile_type7(column, 0.05);
    q.q25 = quantile_type7(column, 0.25);
    q.median = quantile_type7(column, 0.50);
    q.q75 = quantile_type7(column, 0.75);
    q.q95 = quantile_type7(column, 0.95);
    q.max = column.back();
    q.mean = sum / static_cast<double>(column.size());
  }

  // Per-scenario EOL on the measured series continued by the prediction, so
  // the reference voltage stays the very first measurement.
  const double y0 = trained.measured_v.front();
  std::vector<double> ruls;
  std::vector<double> concat;
  for (std::size_t s = 0; s < n_sc; ++s) {
    ScenarioOutcome o;
    o.scenario = static_cast<int>(s);
    o.t_c = scenarios[s].t_c;
    o.lambda = scenarios[s].lambda;
    if (ok[s]) {
      concat = trained.measured_v;
      concat.insert(concat.end(), res.voltage[s].begin(), res.voltage[s].end());
      if (const auto eol = estimate_eol(concat, y0, cfg.eol_fraction)) {
        o.eol_reached = true;
        o.t_eol = *eol;
        o.rul = (*eol >= cfg.t_n)
                    ? estimate_rul(static_cast<double>(*eol), static_cast<double>(cfg.t_n))
                    : static_cast<double>(*eol - cfg.t_n);  // EOL inside the learning window
        ruls.push_back(o.rul);
      }
    }
    res.outcomes.push_back(o);
  }
  res.n_eol_reached = static_cast<int>(ruls.size());
  if (!ruls.empty()) {
    res.rul_median = median_of(ruls);
    double sum = 0.0;
    for (double r : ruls) sum += r;
    res.rul_mean = sum / static_cast<double>(ruls.size());
  } else {
    res.rul_median = std::numeric_limits<double>::quiet_NaN();
    res.rul_mean = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

PrognosisResult predict_ensemble(const TrainOutput& trained, const PrognosisConfig& cfg) {
  ScenarioConfig scfg = cfg.scenario;
  scfg.t_n = cfg.t_n;
  scfg.j_op = cfg.j_op;
  LearningCurve learning{trained.spline, trained.detection, trained.jlim_hourly};
  return predict_with_scenarios(trained, cfg, generate_scenarios(learning, scfg));
}

std::optional<int> estimate_eol(const std::vector<double>& voltage, double y0,
                                double eol_fraction) {
  if (voltage.empty()) throw ValidationError("estimate_eol: voltage series is empty");
  if (!(y0 > 0.0)) throw ValidationError("estimate_eol: y0 must be > 0");
  const double threshold = eol_fraction * y0;
  for (std::size_t i = 0; i < voltage.size(); ++i)
    if (voltage[i] <= threshold) return static_cast<int>(i);
  return std::nullopt;
}

double estimate_rul(double t_eol, double t_n) {
  if (t_eol < t_n) throw ValidationError("estimate_rul: t_eol must not precede t_n");
  return t_eol - t_n;
}

Metrics metrics(const std::vector<double>& predicted, const std::vector<double>& truth,
                double rul_pred, double rul_true) {
  if (predicted.size() != truth.size()) throw ValidationError("metrics: series lengths differ");
  if (predicted.empty()) throw ValidationError("metrics: empty series");
  if (rul_true == 0.0) throw ValidationError("metrics: rul_true must be nonzero");

  Metrics m;
  for (int w = 500; w <= 3000; w += 500) {
    if (predicted.size() < static_cast<std::size_t>(w)) break;
    double acc = 0.0;
    for (int i = 0; i < w; ++i) {
      const double d = predicted[static_cast<std::size_t>(i)] - truth[static_cast<std::size_t>(i)];
      acc += d * d;
    }
    m.rmse_by_horizon.emplace_back(w, std::sqrt(acc / w));
  }

  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    acc += 100.0 * std::fabs(predicted[i] - truth[i]) / truth[i];
  m.mape = acc / static_cast<double>(predicted.size());

  m.ape = 100.0 * std::fabs((rul_true - rul_pred) / rul_true);
  return m;
}

}  // namespace pemfc
