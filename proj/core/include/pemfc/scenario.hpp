#pragma once

#include <cstdint>
#include <vector>

#include "pemfc/changepoint.hpp"

namespace pemfc {

struct ScenarioConfig {
  double mu = 10000.0;     // truncated-exponential scale, h
  double s = 3.0;          // Pareto shape
  int n_scenarios = 500;
  int t_n = 0;             // learning horizon, h
  int t_max = 38000;       // h
  int tau = 10;            // h
  double lambda0 = 2.0;
  double j_op = 1.0;       // A/cm^2; trajectories are floored at 1.05 * j_op
  std::uint64_t seed = 0;
};

// a*t^2 + b*t + c
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double value(double t) const { return (a * t + b) * t + c; }
  double deriv(double t) const { return 2.0 * a * t + b; }
  double second() const { return 2.0 * a; }
};

struct JlimScenario {
  double t_c = 0.0;   // rupture time, h (detected case: the learning horizon)
  double lambda = 1.0;
  Quadratic p1;       // pre-rupture quadratic (detected case: terminal Taylor model of the spline)
  bool from_detection = false;
  std::vector<double> trajectory;  // hourly jlim on (t_n, t_max]; index i is hour t_n + 1 + i
};

// Learning-window inputs the sampler extrapolates from.
struct LearningCurve {
  SplineModel spline;              // through the identified jlim samples on [0, t_n]
  ChangeDetection detection;
  std::vector<double> jlim_hourly;  // [0, t_n]
};

// Inverse-CDF draw of the rupture time conditioned on [t_n, t_max]; maps
// u = 0 and u = 1 to the interval endpoints exactly.
double sample_truncated_exponential(double u, double mu, double t_n, double t_max);

// lambda = u^(-1/s), u in (0, 1]; lambda >= 1.
double sample_pareto(double u, double s);

// Quadratic continuation of the learning curve: matches value and slope at
// t_n, and its decrease over the tau hours before t_c is lambda0 times the
// mean decrease since t = 0 (the rupture-detection identity).
Quadratic build_p1(double t_n, double jlim_n, double slope_n, double jlim_0, double t_c,
                   double tau, double lambda0);

// Post-rupture acceleration: P2(t) = (1-lambda)*P1(t_c) + lambda*P1(t)
//                                    + (1-lambda)*P1'(t_c)*(t - t_c).
double extend_p2(const Quadratic& p1, double t_c, double lambda, double t);

std::vector<JlimScenario> generate_scenarios(const LearningCurve& learning,
                                             const ScenarioConfig& cfg);

}  // namespace pemfc
