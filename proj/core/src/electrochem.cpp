#include "pemfc/electrochem.hpp"

#include <cmath>

#include "pemfc/errors.hpp"

namespace pemfc {

LossComponents loss_components(double j, const QuasiStaticParams& p, const PhysicalConstants& c) {
  if (!(j >= 0.0) || !(j < p.jlim))
    throw NumericalError("loss_components: j must lie in [0, jlim) (diffusion term singular at jlim)");
  if (!(j + p.jn > 0.0)) throw NumericalError("loss_components: j + jn must be positive");
  const double rt_f = c.rt_f();
  LossComponents out;
  out.eta_act = rt_f / (2.0 * c.alpha) * std::log((j + p.jn) / p.j0);
  out.eta_diff = rt_f / (2.0 * p.beta) * std::fabs(std::log1p(-j / p.jlim));  // log1p is exact at j = 0
  out.eta_ohm = p.r_ohm * j;
  return out;
}

double cell_voltage(double j, const QuasiStaticParams& p, const PhysicalConstants& c) {
  const LossComponents l = loss_components(j, p, c);
  return c.E_rev - l.eta_act - l.eta_diff - l.eta_ohm;
}

}  // namespace pemfc
