#pragma once

#include <cstdint>
#include <vector>

#include "pemfc/identification.hpp"
#include "pemfc/types.hpp"

namespace pemfc {

// Planted ground truth for the synthetic aging database. Time evolution in
// x = t / t_max:
//   j0 = a0*exp(-k0*x), jn = an*exp(kn*x), r_ohm = r_ohm0 + k_ohm*x,
//   jlim = M(x) = jlim_a - jlim_b*x - jlim_c*x^2          until t_break,
//   jlim = M(x_c) + jlim_accel*(M(x) - M(x_c))            after it,
// i.e. the decline steepens by jlim_accel at the breakpoint while staying
// continuous in value.
struct GroundTruth {
  double a0 = 1e-6, k0 = 1.3;
  double an = 1e-3, kn = 1.5;
  double r_ohm0 = 0.08, k_ohm = 0.02;  // ohm*cm^2
  double beta = 0.2;

  double jlim_a = 1.8, jlim_b = 0.025, jlim_c = 0.10;  // A/cm^2
  double t_break = 29400.0;  // h
  double jlim_accel = 1.5;

  PhysicalConstants constants;
  OperatingConditions conditions;

  double t_max = 38000.0;   // normalization horizon, h
  double cadence = 500.0;   // h between characterizations
  int horizon = 38072;      // last generated hour
  double j_op = 1.0;        // A/cm^2
  int n_grid = 30;          // polarization-curve grid points
  double grid_lo = 0.02;          // first grid point, A/cm^2
  double grid_hi_frac = 0.97;     // last grid point as a fraction of jlim(t)
};

struct Database {
  std::vector<PolarizationCurve> curves;  // every cadence hours, r_ohm profile attached
  std::vector<double> voltage_hourly;     // t = 0..horizon at j_op
};

void validate(const GroundTruth& gt);

double true_jlim(const GroundTruth& gt, double t);

// All five quasi-static parameters at time t.
QuasiStaticParams true_params(const GroundTruth& gt, double t);

// Noiseless database; the seed is reserved for noise extensions and unused.
Database generate_database(const GroundTruth& gt, std::uint64_t seed = 0);

}  // namespace pemfc
