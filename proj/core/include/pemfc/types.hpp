#pragma once

namespace pemfc {

struct PhysicalConstants {
  double F = 96485.33;  // Faraday constant, C/mol
  double R = 8.314;     // universal gas constant, J/(K mol)
  double T = 348.15;    // cell temperature, K (75 C)
  double alpha = 0.5;   // charge transfer coefficient
  double E_rev = 1.18;  // reversible (Nernst) voltage, V

  double rt_f() const { return R * T / F; }
};

// The identifiable electrochemical parameter vector at one point in life.
struct QuasiStaticParams {
  double j0 = 0.0;     // exchange current density, A/cm^2
  double jn = 0.0;     // parasitic current density, A/cm^2
  double beta = 0.0;   // diffusion coefficient, dimensionless
  double jlim = 0.0;   // limiting current density, A/cm^2
  double r_ohm = 0.0;  // ohmic resistance density, ohm cm^2
};

// Fixed bench conditions; metadata carried through configs and manifests.
struct OperatingConditions {
  double temperature_c = 75.0;
  double pressure_bara = 2.0;
  double rh_air_pct = 30.0;
  double stoich_air = 2.5;
  double rh_h2_pct = 50.0;
  double stoich_h2 = 1.5;
};

// Each throws ValidationError naming the violated field.
void validate(const PhysicalConstants& c);
void validate(const QuasiStaticParams& p);
void validate(const OperatingConditions& oc);

}  // namespace pemfc
