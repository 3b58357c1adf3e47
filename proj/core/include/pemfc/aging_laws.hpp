#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace pemfc {

// Time-evolution models for the quasi-static parameters, all expressed in
// normalized time x = t / t_max:
//   j0(x)    = a0 * exp(-k0 * x)
//   jn(x)    = an * exp(+kn * x)
//   r_ohm(x) = r_ohm0 + k_ohm * x
//   jlim(x)  = a1 * exp(-k1 * x^2)                              (model 1)
//   jlim(x)  = model1 + a2 * (exp(-k2 * (x - t_c)^2) - 1) * [x >= t_c]  (model 2)

enum class LawSign { Decay, Growth };

struct JlimModel1 {
  double a1 = 0.0;
  double k1 = 0.0;
};

struct JlimModel2 {
  double a1 = 0.0;
  double k1 = 0.0;
  double a2 = 0.0;
  double k2 = 0.0;
  double t_c = 0.0;  // normalized time
};

struct AgingLaws {
  double a0 = 0.0, k0 = 0.0;
  double an = 0.0, kn = 0.0;
  double r_ohm0 = 0.0, k_ohm = 0.0;
  std::variant<JlimModel1, JlimModel2> jlim_model;
  double t_max = 38000.0;  // h
};

// Values of all four laws at one instant.
struct LawValues {
  double j0 = 0.0;
  double jn = 0.0;
  double r_ohm = 0.0;
  double jlim = 0.0;
};

struct Model2Fit {
  JlimModel2 model;
  double rmse = 0.0;
  int n_iterations = 0;
  bool converged = false;
};

double normalize_time(double t, double t_max);

// Exact log-space linear regression; sign picks which exponent convention the
// returned k refers to (value = a*exp(-k*x) for Decay, a*exp(+k*x) for Growth).
std::pair<double, double> fit_exponential_law(const std::vector<std::pair<double, double>>& samples,
                                              LawSign sign);

// Ordinary least squares; returns (intercept, slope).
std::pair<double, double> fit_linear_law(const std::vector<std::pair<double, double>>& samples);

// Log-space linear regression against x^2.
JlimModel1 fit_jlim_model1(const std::vector<std::pair<double, double>>& samples);

// Nonlinear least squares over all five coefficients; the breakpoint makes the
// objective only piecewise smooth in t_c, so the fit multi-starts from a grid
// of candidate breakpoints taken at the sample times.
Model2Fit fit_jlim_model2(const std::vector<std::pair<double, double>>& samples);

double eval_jlim(const JlimModel1& m, double x);
double eval_jlim(const JlimModel2& m, double x);

LawValues eval_laws(const AgingLaws& laws, double t);

}  // namespace pemfc
