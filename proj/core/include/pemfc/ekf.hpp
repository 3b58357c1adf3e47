#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pemfc/types.hpp"

namespace pemfc {

// State vector theta = (j0, jn, r_ohm); jlim enters the observation as an
// exogenous input, one value per hour.

struct EkfState {
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  Eigen::Matrix3d P = Eigen::Matrix3d::Zero();
  int k = 0;  // hour index
};

// theta_{k+1} = F theta_k + f,  F = diag(exp(-k0*dt), exp(kn*dt), 1),
// f = (0, 0, k_ohm*dt); dt in normalized time so the aging-law rates carry
// over unchanged (1/t_max per hourly step).
struct TransitionModel {
  double k0 = 0.0;
  double kn = 0.0;
  double k_ohm = 0.0;
  double dt_norm = 1.0 / 38000.0;
};

struct NoiseConfig {
  Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
  double R = 1e-8;  // V^2
  Eigen::Matrix3d P0 = Eigen::Matrix3d::Zero();
  Eigen::Vector3d theta0 = Eigen::Vector3d::Zero();
};

// The voltage observation needs the diffusion exponent beta on top of the
// physical constants; beta is fixed by identification, not filtered.
struct ObservationModel {
  PhysicalConstants constants;
  double beta = 0.3;
};

struct TraceRow {
  int k = 0;
  double t = 0.0;       // h
  double j0 = 0.0;
  double jn = 0.0;
  double r_ohm = 0.0;
  double predicted_v = 0.0;  // observation at the predicted state
  double innovation = 0.0;   // NaN when the update was rejected
};

struct FilterResult {
  std::vector<TraceRow> trace;
  EkfState final_state;
};

EkfState predict(const EkfState& state, const TransitionModel& m, const Eigen::Matrix3d& Q);

double observation(const Eigen::Vector3d& theta, double jlim, double j, const ObservationModel& om);

// d(observation)/d(theta) = [RT/(F j0), -RT/(F (j+jn)), -j].
Eigen::RowVector3d observation_jacobian(const Eigen::Vector3d& theta, double jlim, double j,
                                        const ObservationModel& om);

// Scalar-measurement update, Joseph-form covariance; a non-finite innovation
// rejects the step and passes the state through.
EkfState update(const EkfState& state, double y, double jlim, double j,
                const ObservationModel& om, double R);

// Correction pass over the learning window: update at hour 0, then
// predict+update each following hour.
FilterResult run_filter(const std::vector<double>& measurements,
                        const std::vector<double>& jlim_series, const TransitionModel& m,
                        const NoiseConfig& n, double j, const ObservationModel& om);

}  // namespace pemfc
