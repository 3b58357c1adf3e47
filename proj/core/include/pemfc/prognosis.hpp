#pragma once

#include <optional>
#include <vector>

#include "pemfc/aging_laws.hpp"
#include "pemfc/changepoint.hpp"
#include "pemfc/ekf.hpp"
#include "pemfc/identification.hpp"
#include "pemfc/scenario.hpp"
#include "pemfc/synthdata.hpp"

namespace pemfc {

struct PrognosisConfig {
  int t_n = 30000;            // learning horizon, h
  double j_op = 1.0;          // A/cm^2
  double eol_fraction = 0.90;
  PhysicalConstants constants;
  ScenarioConfig scenario;    // t_n and j_op are synced from the fields above
  double r_meas = 1e-8;       // measurement variance, V^2
  double q_rel = 1e-4;        // process-noise std, relative to theta0 per component
  double p0_rel = 1e-2;       // initial-covariance std, relative to theta0
};

// Everything the prediction phase needs from the learning window.
struct TrainOutput {
  std::vector<FitResult> fits;        // per characterization
  AgingLaws laws;                     // jlim slot holds the model-1 comparison fit
  SplineModel spline;                 // constrained spline through identified jlim
  ChangeDetection detection;
  TransitionModel transition;
  ObservationModel obs;
  NoiseConfig noise;
  FilterResult filter;                // learning-window correction pass
  EkfState final_state;
  std::vector<double> measured_v;     // hourly voltage on [0, t_n]
  std::vector<double> jlim_hourly;    // spline-interpolated jlim on [0, t_n]
};

struct QuantileRow {
  double t = 0.0;
  double min = 0.0, q05 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q95 = 0.0, max = 0.0;
  double mean = 0.0;
};

struct ScenarioOutcome {
  int scenario = 0;
  double t_c = 0.0;
  double lambda = 1.0;
  bool eol_reached = false;
  int t_eol = 0;     // h, valid iff eol_reached
  double rul = 0.0;  // t_eol - t_n
};

struct PrognosisResult {
  std::vector<std::vector<double>> voltage;  // [scenario][h], h = t - t_n - 1
  std::vector<QuantileRow> quantiles;        // one row per hour on (t_n, t_max]
  std::vector<ScenarioOutcome> outcomes;
  int n_eol_reached = 0;
  double rul_median = 0.0;  // over scenarios that reach EOL
  double rul_mean = 0.0;
};

struct Metrics {
  std::vector<std::pair<int, double>> rmse_by_horizon;  // (window h, RMSE V)
  double mape = 0.0;  // %
  double ape = 0.0;   // %
};

// Identification -> law fits -> spline interpolation -> change detection ->
// EKF correction pass over [0, t_n].
TrainOutput train(const Database& database, const PrognosisConfig& cfg);

// Monte Carlo jlim scenarios, each pushed through the prediction-only filter
// and the observation function; ensemble statistics per hour.
PrognosisResult predict_ensemble(const TrainOutput& trained, const PrognosisConfig& cfg);

// Same prediction machinery on caller-supplied scenarios (degenerate or
// oracle inputs).
PrognosisResult predict_with_scenarios(const TrainOutput& trained, const PrognosisConfig& cfg,
                                       const std::vector<JlimScenario>& scenarios);

// First hour at which voltage drops to eol_fraction * y0, if any.
std::optional<int> estimate_eol(const std::vector<double>& voltage, double y0,
                                double eol_fraction);

double estimate_rul(double t_eol, double t_n);

Metrics metrics(const std::vector<double>& predicted, const std::vector<double>& truth,
                double rul_pred, double rul_true);

}  // namespace pemfc
