#include "pemfc/aging_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pemfc/errors.hpp"
#include "pemfc/lm.hpp"

namespace pemfc {

namespace {

// Simple OLS of y on x; returns (intercept, slope).
std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw NumericalError("ols: degenerate abscissae (all x identical)");
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  return {intercept, slope};
}

}  // namespace

double normalize_time(double t, double t_max) {
  if (!(t >= 0.0)) throw ValidationError("normalize_time: t must be >= 0");
  if (!(t_max > 0.0)) throw ValidationError("normalize_time: t_max must be > 0");
  return t / t_max;
}

std::pair<double, double> fit_exponential_law(const std::vector<std::pair<double, double>>& samples,
                                              LawSign sign) {
  if (samples.size() < 2) throw ValidationError("fit_exponential_law: need at least 2 samples");
  std::vector<double> x, ly;
  x.reserve(samples.size());
  ly.reserve(samples.size());
  for (const auto& [t, v] : samples) {
    if (!(v > 0.0)) throw ValidationError("fit_exponential_law: values must be > 0");
    x.push_back(t);
    ly.push_back(std::log(v));
  }
  const auto [intercept, slope] = ols(x, ly);
  const double k = (sign == LawSign::Decay) ? -slope : slope;
  return {std::exp(intercept), k};
}

std::pair<double, double> fit_linear_law(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw ValidationError("fit_linear_law: need at least 2 samples");
  std::vector<double> x, y;
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const auto& [t, v] : samples) {
    x.push_back(t);
    y.push_back(v);
  }
  return ols(x, y);
}

JlimModel1 fit_jlim_model1(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw ValidationError("fit_jlim_model1: need at least 2 samples");
  std::vector<double> x2, ly;
  x2.reserve(samples.size());
  ly.reserve(samples.size());
  for (const auto& [t, v] : samples) {
    if (!(v > 0.0)) throw ValidationError("fit_jlim_model1: values must be > 0");
    x2.push_back(t * t);
    ly.push_back(std::log(v));
  }
  const auto [intercept, slope] = ols(x2, ly);
  return {std::exp(intercept), -slope};
}

double eval_jlim(const JlimModel1& m, double x) { return m.a1 * std::exp(-m.k1 * x * x); }

double eval_jlim(const JlimModel2& m, double x) {
  double v = m.a1 * std::exp(-m.k1 * x * x);
  if (x >= m.t_c) {
    const double d = x - m.t_c;
    v += m.a2 * (std::exp(-m.k2 * d * d) - 1.0);
  }
  return v;
}

Model2Fit fit_jlim_model2(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 6) throw ValidationError("fit_jlim_model2: need at least 6 samples");
  for (const auto& [t, v] : samples) {
    (void)t;
    if (!(v > 0.0)) throw ValidationError("fit_jlim_model2: values must be > 0");
  }
  std::vector<std::pair<double, double>> pts(samples);
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();

  // Smooth part first; its tail misfit seeds the breakpoint amplitude.
  const JlimModel1 pre = fit_jlim_model1(pts);
  const double pred_last = eval_jlim(pre, pts.back().first);
  const double a2_init = std::max(1e-3, pred_last - pts.back().second);

  auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    const double a1 = p[0], k1 = p[1], a2 = p[2], k2 = p[3], tc = p[4];
    r.resize(static_cast<Eigen::Index>(n));
    J.resize(static_cast<Eigen::Index>(n), 5);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [t, y] = pts[i];
      const double e1 = std::exp(-k1 * t * t);
      double f = a1 * e1;
      J(static_cast<Eigen::Index>(i), 0) = e1;
      J(static_cast<Eigen::Index>(i), 1) = -a1 * t * t * e1;
      if (t >= tc) {
        const double d = t - tc;
        const double e2 = std::exp(-k2 * d * d);
        f += a2 * (e2 - 1.0);
        J(static_cast<Eigen::Index>(i), 2) = e2 - 1.0;
        J(static_cast<Eigen::Index>(i), 3) = -a2 * d * d * e2;
        J(static_cast<Eigen::Index>(i), 4) = a2 * e2 * 2.0 * k2 * d;
      } else {
        J(static_cast<Eigen::Index>(i), 2) = 0.0;
        J(static_cast<Eigen::Index>(i), 3) = 0.0;
        J(static_cast<Eigen::Index>(i), 4) = 0.0;
      }
      r[static_cast<Eigen::Index>(i)] = f - y;
    }
  };

  // Multi-start over candidate breakpoints: every sample time that still
  // leaves at least two samples strictly beyond it.
  Model2Fit best;
  double best_sse = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t c = 0; c + 2 < n; ++c) {
    Eigen::VectorXd p0(5);
    p0 << pre.a1, pre.k1, a2_init, 10.0, pts[c].first;
    const LmResult lm = lm_minimize(p0, model);
    if (!std::isfinite(lm.sse)) continue;
    std::size_t beyond = 0;
    for (const auto& [t, y] : pts) {
      (void)y;
      if (t > lm.x[4]) ++beyond;
    }
    if (beyond < 2) continue;
    if (lm.sse < best_sse) {
      best_sse = lm.sse;
      best.model = {lm.x[0], lm.x[1], lm.x[2], lm.x[3], lm.x[4]};
      best.rmse = std::sqrt(lm.sse / static_cast<double>(n));
      best.n_iterations = lm.n_iterations;
      best.converged = lm.converged;
      any = true;
    }
  }
  if (!any)
    throw NumericalError("fit_jlim_model2: no admissible fit (fewer than 2 samples beyond every candidate breakpoint)");
  if (!best.converged) throw NumericalError("fit_jlim_model2: LM did not converge");
  return best;
}

LawValues eval_laws(const AgingLaws& laws, double t) {
  if (!(t >= 0.0)) throw ValidationError("eval_laws: t must be >= 0");
  const double x = normalize_time(t, laws.t_max);
  LawValues v;
  v.j0 = laws.a0 * std::exp(-laws.k0 * x);
  v.jn = laws.an * std::exp(laws.kn * x);
  v.r_ohm = laws.r_ohm0 + laws.k_ohm * x;
  v.jlim = std::visit([x](const auto& m) { return eval_jlim(m, x); }, laws.jlim_model);
  return v;
}

}  // namespace pemfc
