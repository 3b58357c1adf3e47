#include "pemfc/changepoint.hpp"

#include <algorithm>
#include <cmath>

#include "pemfc/errors.hpp"

namespace pemfc {

SplineModel fit_constrained_spline(const std::vector<std::pair<double, double>>& knots) {
  const std::size_t n = knots.size();
  if (n < 2) throw ValidationError("fit_constrained_spline: need at least 2 knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knots[i].first > knots[i - 1].first))
      throw ValidationError("fit_constrained_spline: knot times must be strictly increasing");
  }

  SplineModel s;
  s.t.resize(n);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.t[i] = knots[i].first;
    s.y[i] = knots[i].second;
  }

  std::vector<double> h(n - 1), sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = s.t[i + 1] - s.t[i];
    sec[i] = (s.y[i + 1] - s.y[i]) / h[i];
  }

  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = sec[0];  // two knots: exact line
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      // Harmonic mean of adjacent secants; zero across a sign change so the
      // curve cannot leave the band spanned by neighbouring knots.
      d[i] = (sec[i - 1] * sec[i] <= 0.0) ? 0.0 : 2.0 / (1.0 / sec[i - 1] + 1.0 / sec[i]);
    }
    d[0] = 1.5 * sec[0] - 0.5 * d[1];
    d[n - 1] = 1.5 * sec[n - 2] - 0.5 * d[n - 2];
  }

  s.coef.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c2 = (3.0 * sec[i] - 2.0 * d[i] - d[i + 1]) / h[i];
    const double c3 = (d[i] + d[i + 1] - 2.0 * sec[i]) / (h[i] * h[i]);
    s.coef[i] = {s.y[i], d[i], c2, c3};
  }
  return s;
}

namespace {

std::size_t interval_index(const SplineModel& s, double t) {
  if (!(t >= s.t.front() && t <= s.t.back()))
    throw ValidationError("eval_spline: t outside the knot range");
  auto hi = std::upper_bound(s.t.begin(), s.t.end(), t);
  std::size_t i = static_cast<std::size_t>(hi - s.t.begin());
  if (i > 0) --i;
  if (i >= s.coef.size()) i = s.coef.size() - 1;  // t at the last knot
  return i;
}

}  // namespace

std::pair<double, double> eval_spline(const SplineModel& s, double t) {
  const std::size_t i = interval_index(s, t);
  const double u = t - s.t[i];
  const auto& c = s.coef[i];
  const double value = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
  const double deriv = c[1] + u * (2.0 * c[2] + u * 3.0 * c[3]);
  return {value, deriv};
}

double spline_second_derivative(const SplineModel& s, double t) {
  const std::size_t i = interval_index(s, t);
  const double u = t - s.t[i];
  const auto& c = s.coef[i];
  return 2.0 * c[2] + 6.0 * c[3] * u;
}

ChangeDetection detect_change(const std::vector<double>& jlim_hourly, int tau, double lambda0) {
  if (tau <= 0) throw ValidationError("detect_change: tau must be > 0");
  if (!(lambda0 > 0.0)) throw ValidationError("detect_change: lambda0 must be > 0");
  const int t_n = static_cast<int>(jlim_hourly.size()) - 1;
  if (t_n < 3 * tau) throw ValidationError("detect_change: series shorter than 3*tau");

  ChangeDetection out;
  for (int t = 3 * tau; t <= t_n; ++t) {
    const double short_rate = (jlim_hourly[t - tau] - jlim_hourly[t]) / tau;
    const double long_rate = (jlim_hourly[0] - jlim_hourly[t - tau]) / (t - tau);
    if (long_rate <= 1e-15) continue;  // flat history: ratio test undefined
    out.lambda_trace.emplace_back(static_cast<double>(t), short_rate / long_rate);
    if (short_rate >= lambda0 * long_rate) {
      out.detected = true;
      out.t_c = static_cast<double>(t - tau);
      return out;
    }
  }
  return out;
}

std::vector<double> interpolate_jlim_hourly(const std::vector<std::pair<double, double>>& identified,
                                            int t_n) {
  if (t_n < 0) throw ValidationError("interpolate_jlim_hourly: t_n must be >= 0");
  if (identified.empty() || identified.front().first > 0.0 ||
      identified.back().first < static_cast<double>(t_n))
    throw ValidationError("interpolate_jlim_hourly: samples do not cover [0, t_n]");
  const SplineModel s = fit_constrained_spline(identified);
  std::vector<double> out(static_cast<std::size_t>(t_n) + 1);
  for (int t = 0; t <= t_n; ++t) out[static_cast<std::size_t>(t)] = eval_spline(s, t).first;
  return out;
}

}  // namespace pemfc
