#pragma once

#include <array>
#include <utility>
#include <vector>

namespace pemfc {

// Constrained cubic spline (no-overshoot Hermite construction): interior
// slopes are harmonic means of the adjacent secants, zeroed on sign change,
// so each interval stays within its bounding knot values. C1 only.
struct SplineModel {
  std::vector<double> t;                     // knot times
  std::vector<double> y;                     // knot values
  std::vector<std::array<double, 4>> coef;   // per interval, in u = t - t_i
};

struct ChangeDetection {
  bool detected = false;
  double t_c = 0.0;  // valid iff detected
  std::vector<std::pair<double, double>> lambda_trace;  // (scan time, rate ratio)
};

SplineModel fit_constrained_spline(const std::vector<std::pair<double, double>>& knots);

// Value and first derivative at t (requires knots.front().t <= t <= knots.back().t).
std::pair<double, double> eval_spline(const SplineModel& s, double t);

// One-sided second derivative of the interval cubic containing t.
double spline_second_derivative(const SplineModel& s, double t);

// Scan for the first instant where the short-window decrease rate over the
// last tau hours reaches lambda0 times the long-run rate since t = 0; the
// breakpoint is reported at the start of the short window. Series index is
// the hour.
ChangeDetection detect_change(const std::vector<double>& jlim_hourly, int tau = 10,
                              double lambda0 = 2.0);

// Hourly series on [0, t_n] from the constrained spline through the
// identified samples.
std::vector<double> interpolate_jlim_hourly(const std::vector<std::pair<double, double>>& identified,
                                            int t_n);

}  // namespace pemfc
