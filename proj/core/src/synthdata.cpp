#include "pemfc/synthdata.hpp"

#include <cmath>

#include "pemfc/electrochem.hpp"
#include "pemfc/errors.hpp"

namespace pemfc {

void validate(const GroundTruth& gt) {
  validate(gt.constants);
  if (!(gt.a0 > 0.0 && gt.an > 0.0 && gt.r_ohm0 > 0.0 && gt.beta > 0.0))
    throw ValidationError("GroundTruth: a0, an, r_ohm0, beta must be > 0");
  if (!(gt.t_max > 0.0) || gt.horizon <= 0) throw ValidationError("GroundTruth: non-positive horizon");
  if (!(gt.t_break > 0.0 && gt.t_break < gt.horizon))
    throw ValidationError("GroundTruth: t_break must lie strictly inside the horizon");
  if (!(gt.cadence > 0.0)) throw ValidationError("GroundTruth: cadence must be > 0");
  if (gt.n_grid < 2) throw ValidationError("GroundTruth: need at least 2 grid points");
  if (!(gt.grid_lo > 0.0) || !(gt.grid_hi_frac > 0.0 && gt.grid_hi_frac < 1.0))
    throw ValidationError("GroundTruth: grid bounds out of range");
  if (!(true_jlim(gt, gt.horizon) > gt.j_op))
    throw ValidationError("GroundTruth: jlim must stay above the operating current over the horizon");
}

double true_jlim(const GroundTruth& gt, double t) {
  const auto pre = [&](double x) { return gt.jlim_a - gt.jlim_b * x - gt.jlim_c * x * x; };
  const double x = t / gt.t_max;
  if (t <= gt.t_break) return pre(x);
  const double m_c = pre(gt.t_break / gt.t_max);
  return m_c + gt.jlim_accel * (pre(x) - m_c);
}

QuasiStaticParams true_params(const GroundTruth& gt, double t) {
  const double x = t / gt.t_max;
  QuasiStaticParams p;
  p.j0 = gt.a0 * std::exp(-gt.k0 * x);
  p.jn = gt.an * std::exp(gt.kn * x);
  p.beta = gt.beta;
  p.jlim = true_jlim(gt, t);
  p.r_ohm = gt.r_ohm0 + gt.k_ohm * x;
  return p;
}

Database generate_database(const GroundTruth& gt, std::uint64_t seed) {
  (void)seed;  // reserved for noise extensions, off by default
  validate(gt);

  Database db;
  for (double t = 0.0; t <= static_cast<double>(gt.horizon); t += gt.cadence) {
    const QuasiStaticParams p = true_params(gt, t);
    PolarizationCurve curve;
    curve.t = t;
    curve.points.reserve(static_cast<std::size_t>(gt.n_grid));
    curve.r_ohm_profile.reserve(static_cast<std::size_t>(gt.n_grid));
    const double hi = gt.grid_hi_frac * p.jlim;
    for (int i = 0; i < gt.n_grid; ++i) {
      const double j = gt.grid_lo + (hi - gt.grid_lo) * i / (gt.n_grid - 1);
      curve.points.emplace_back(j, cell_voltage(j, p, gt.constants));
      curve.r_ohm_profile.emplace_back(j, p.r_ohm);  // constant in j
    }
    db.curves.push_back(std::move(curve));
  }

  db.voltage_hourly.resize(static_cast<std::size_t>(gt.horizon) + 1);
  for (int t = 0; t <= gt.horizon; ++t)
    db.voltage_hourly[static_cast<std::size_t>(t)] =
        cell_voltage(gt.j_op, true_params(gt, t), gt.constants);
  return db;
}

}  // namespace pemfc
