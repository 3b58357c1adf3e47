#include "pemfc/types.hpp"

#include "pemfc/errors.hpp"

namespace pemfc {

void validate(const PhysicalConstants& c) {
  if (!(c.F > 0.0)) throw ValidationError("PhysicalConstants: F must be positive");
  if (!(c.R > 0.0)) throw ValidationError("PhysicalConstants: R must be positive");
  if (!(c.T > 0.0)) throw ValidationError("PhysicalConstants: T must be positive");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ValidationError("PhysicalConstants: alpha must be in (0, 1]");
  if (!(c.E_rev > 0.0)) throw ValidationError("PhysicalConstants: E_rev must be positive");
}

void validate(const QuasiStaticParams& p) {
  if (!(p.j0 > 0.0)) throw ValidationError("QuasiStaticParams: j0 must be positive");
  if (!(p.jn >= 0.0)) throw ValidationError("QuasiStaticParams: jn must be non-negative");
  if (!(p.beta > 0.0)) throw ValidationError("QuasiStaticParams: beta must be positive");
  if (!(p.jlim > 0.0)) throw ValidationError("QuasiStaticParams: jlim must be positive");
  if (!(p.r_ohm >= 0.0)) throw ValidationError("QuasiStaticParams: r_ohm must be non-negative");
}

void validate(const OperatingConditions& oc) {
  if (!(oc.temperature_c > 0.0)) throw ValidationError("OperatingConditions: temperature must be positive");
  if (!(oc.pressure_bara > 0.0)) throw ValidationError("OperatingConditions: pressure must be positive");
  if (!(oc.rh_air_pct > 0.0 && oc.rh_air_pct <= 100.0))
    throw ValidationError("OperatingConditions: rh_air must be in (0, 100]");
  if (!(oc.stoich_air > 0.0)) throw ValidationError("OperatingConditions: stoich_air must be positive");
  if (!(oc.rh_h2_pct > 0.0 && oc.rh_h2_pct <= 100.0))
    throw ValidationError("OperatingConditions: rh_h2 must be in (0, 100]");
  if (!(oc.stoich_h2 > 0.0)) throw ValidationError("OperatingConditions: stoich_h2 must be positive");
}

}  // namespace pemfc
