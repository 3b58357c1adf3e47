#include "pemfc/scenario.hpp"

#include <cmath>

#include "pemfc/errors.hpp"
#include "pemfc/rng.hpp"

namespace pemfc {

double sample_truncated_exponential(double u, double mu, double t_n, double t_max) {
  if (!(u >= 0.0 && u <= 1.0)) throw ValidationError("sample_truncated_exponential: u outside [0, 1]");
  if (!(mu > 0.0)) throw ValidationError("sample_truncated_exponential: mu must be > 0");
  if (!(t_n < t_max)) throw ValidationError("sample_truncated_exponential: need t_n < t_max");
  if (u == 0.0) return t_n;
  if (u == 1.0) return t_max;
  const double fn = std::exp(-t_n / mu);
  const double fm = std::exp(-t_max / mu);
  return -mu * std::log(fn - (fn - fm) * u);
}

double sample_pareto(double u, double s) {
  if (!(u > 0.0 && u <= 1.0)) throw ValidationError("sample_pareto: u must lie in (0, 1]");
  if (!(s > 0.0)) throw ValidationError("sample_pareto: s must be > 0");
  return std::pow(u, -1.0 / s);
}

Quadratic build_p1(double t_n, double jlim_n, double slope_n, double jlim_0, double t_c,
                   double tau, double lambda0) {
  if (!(t_c > t_n)) throw ValidationError("build_p1: t_c must exceed t_n");
  const double dt = t_c - t_n;
  const double den = lambda0 * dt * dt - t_c * (2.0 * dt + tau);
  if (den == 0.0 || !std::isfinite(den))
    throw NumericalError("build_p1: singular coefficient system");
  Quadratic p;
  p.a = (lambda0 * (jlim_0 - jlim_n - slope_n * dt) + slope_n * t_c) / den;
  p.b = slope_n - 2.0 * p.a * t_n;
  p.c = jlim_n - slope_n * t_n + p.a * t_n * t_n;
  return p;
}

double extend_p2(const Quadratic& p1, double t_c, double lambda, double t) {
  const double at_c = p1.value(t_c);
  return (1.0 - lambda) * at_c + lambda * p1.value(t) + (1.0 - lambda) * p1.deriv(t_c) * (t - t_c);
}

std::vector<JlimScenario> generate_scenarios(const LearningCurve& learning,
                                             const ScenarioConfig& cfg) {
  if (!(cfg.mu > 0.0)) throw ValidationError("generate_scenarios: mu must be > 0");
  if (!(cfg.s > 0.0)) throw ValidationError("generate_scenarios: s must be > 0");
  if (cfg.n_scenarios < 1) throw ValidationError("generate_scenarios: need at least 1 scenario");
  if (!(cfg.t_n < cfg.t_max)) throw ValidationError("generate_scenarios: need t_n < t_max");
  if (static_cast<int>(learning.jlim_hourly.size()) != cfg.t_n + 1)
    throw ValidationError("generate_scenarios: learning series does not cover [0, t_n]");

  const double t_n = static_cast<double>(cfg.t_n);
  const auto [s_n, sp_n] = eval_spline(learning.spline, t_n);
  const double s2_n = spline_second_derivative(learning.spline, t_n);
  const double jlim_0 = learning.jlim_hourly.front();
  const double floor = 1.05 * cfg.j_op;
  const std::size_t horizon = static_cast<std::size_t>(cfg.t_max - cfg.t_n);

  // Detected case: the learning curve itself plays the pre-rupture role, so
  // the acceleration applies from t_n onwards to its terminal quadratic
  // Taylor model (value, slope, one-sided curvature at t_n).
  Quadratic taylor;
  taylor.a = 0.5 * s2_n;
  taylor.b = sp_n - s2_n * t_n;
  taylor.c = s_n - sp_n * t_n + 0.5 * s2_n * t_n * t_n;

  std::vector<JlimScenario> out;
  out.reserve(static_cast<std::size_t>(cfg.n_scenarios));
  for (int i = 0; i < cfg.n_scenarios; ++i) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    JlimScenario sc;
    if (learning.detection.detected) {
      sc.from_detection = true;
      sc.t_c = t_n;
      sc.lambda = sample_pareto(1.0 - rng.u01(), cfg.s);
      sc.p1 = taylor;
    } else {
      // The quadratic continuation can be singular for some (t_c, lambda0);
      // redraw the scenario when that happens.
      bool built = false;
      for (int attempt = 0; attempt < 100 && !built; ++attempt) {
        const double t_c = sample_truncated_exponential(rng.u01(), cfg.mu, t_n,
                                                        static_cast<double>(cfg.t_max));
        const double lambda = sample_pareto(1.0 - rng.u01(), cfg.s);
        try {
          sc.p1 = build_p1(t_n, s_n, sp_n, jlim_0, t_c, static_cast<double>(cfg.tau),
                           cfg.lambda0);
        } catch (const NumericalError&) {
          continue;
        }
        sc.t_c = t_c;
        sc.lambda = lambda;
        built = true;
      }
      if (!built)
        throw NumericalError("generate_scenarios: scenario " + std::to_string(i) +
                             " hit a singular P1 on 100 consecutive draws");
    }

    sc.trajectory.resize(horizon);
    bool floored = false;
    for (std::size_t k = 0; k < horizon; ++k) {
      const double t = t_n + static_cast<double>(k + 1);
      double v;
      if (t <= sc.t_c)
        v = sc.p1.value(t);
      else
        v = extend_p2(sc.p1, sc.t_c, sc.lambda, t);
      if (floored || v < floor) {
        floored = true;  // sticky: past the floor the trajectory stays there
        v = floor;
      }
      sc.trajectory[k] = v;
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace pemfc
