#pragma once

#include "pemfc/types.hpp"

namespace pemfc {

struct LossComponents {
  double eta_act = 0.0;   // activation loss, V
  double eta_diff = 0.0;  // diffusion loss, V
  double eta_ohm = 0.0;   // ohmic loss, V
};

// Quasi-static loss terms at current density j:
//   eta_act  = RT/(2 alpha F) * ln((j + jn) / j0)
//   eta_diff = RT/(2 beta F)  * |ln(1 - j/jlim)|
//   eta_ohm  = r_ohm * j
// Throws NumericalError when j >= jlim (diffusion singular) or j + jn <= 0.
LossComponents loss_components(double j, const QuasiStaticParams& p, const PhysicalConstants& c);

// U_cell(j) = E_rev - eta_act - eta_diff - eta_ohm
double cell_voltage(double j, const QuasiStaticParams& p, const PhysicalConstants& c);

}  // namespace pemfc
