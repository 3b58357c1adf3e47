#pragma once

#include <utility>
#include <vector>

#include "pemfc/types.hpp"

namespace pemfc {

// One characterization: a noise-free polarization curve plus the measured
// ohmic-resistance profile at the same time.
struct PolarizationCurve {
  double t = 0.0;                                         // characterization time, h
  std::vector<std::pair<double, double>> points;          // (j, u), j strictly increasing
  std::vector<std::pair<double, double>> r_ohm_profile;   // (j, r), covers the j range of points
};

struct FitResult {
  QuasiStaticParams params;
  double rmse = 0.0;  // V
  int n_iterations = 0;
  bool converged = false;
};

// Linear interpolation of the ohmic profile at j, clamped at both ends.
double interp_r_ohm(const PolarizationCurve& curve, double j);

// Initial guess when the caller has none: order-of-magnitude typical values,
// with jlim anchored just above the largest observed current density.
QuasiStaticParams default_init(const PolarizationCurve& curve);

// Nonlinear least squares for (j0, jn, beta, jlim) on one curve. The ohmic
// term is supplied by the measured profile, not fitted. Positivity is kept by
// optimizing the logs of the parameters; when free_beta is false, beta stays
// at init.beta. Throws ValidationError on degenerate curves.
FitResult fit_single_curve(const PolarizationCurve& curve, const PhysicalConstants& c,
                           const QuasiStaticParams& init, bool free_beta);

// Two-stage set fit: free-beta fits per curve, then every curve refit with
// beta fixed to the stage-1 median so the whole set shares one value.
std::vector<FitResult> fit_curve_set(const std::vector<PolarizationCurve>& curves,
                                     const PhysicalConstants& c);

// Root mean square difference of two equal-length series. Throws
// ValidationError on length mismatch or empty input.
double rmse(const std::vector<double>& model_u, const std::vector<double>& data_u);

}  // namespace pemfc
