#include "pemfc/ekf.hpp"

#include <cmath>
#include <limits>

#include "pemfc/errors.hpp"

namespace pemfc {

namespace {

Eigen::Matrix3d symmetrize(const Eigen::Matrix3d& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

EkfState predict(const EkfState& state, const TransitionModel& m, const Eigen::Matrix3d& Q) {
  const Eigen::Vector3d f_diag(std::exp(-m.k0 * m.dt_norm), std::exp(m.kn * m.dt_norm), 1.0);
  EkfState out;
  out.theta = f_diag.cwiseProduct(state.theta);
  out.theta[2] += m.k_ohm * m.dt_norm;
  out.P = symmetrize(f_diag.asDiagonal() * state.P * f_diag.asDiagonal() + Q);
  out.k = state.k + 1;
  return out;
}

double observation(const Eigen::Vector3d& theta, double jlim, double j, const ObservationModel& om) {
  const double j0 = theta[0], jn = theta[1], r_ohm = theta[2];
  if (!(j < jlim)) throw NumericalError("observation: j must be below jlim");
  if (!(j + jn > 0.0) || !(j0 > 0.0)) throw NumericalError("observation: non-positive kinetic arguments");
  const double rt_f = om.constants.rt_f();
  return om.constants.E_rev - rt_f * std::log((j + jn) / j0) - r_ohm * j +
         rt_f / (2.0 * om.beta) * std::log1p(-j / jlim);
}

Eigen::RowVector3d observation_jacobian(const Eigen::Vector3d& theta, double jlim, double j,
                                        const ObservationModel& om) {
  const double j0 = theta[0], jn = theta[1];
  if (!(j < jlim)) throw NumericalError("observation_jacobian: j must be below jlim");
  if (!(j + jn > 0.0) || !(j0 > 0.0))
    throw NumericalError("observation_jacobian: non-positive kinetic arguments");
  const double rt_f = om.constants.rt_f();
  return {rt_f / j0, -rt_f / (j + jn), -j};
}

EkfState update(const EkfState& state, double y, double jlim, double j, const ObservationModel& om,
                double R) {
  if (!(R > 0.0)) throw ValidationError("update: R must be > 0");
  double innovation;
  Eigen::RowVector3d H;
  try {
    innovation = y - observation(state.theta, jlim, j, om);
    H = observation_jacobian(state.theta, jlim, j, om);
  } catch (const NumericalError&) {
    return state;  // observation singular at this state: reject the step
  }
  if (!std::isfinite(innovation)) return state;

  const double S = (H * state.P * H.transpose())(0) + R;
  const Eigen::Vector3d K = state.P * H.transpose() / S;
  EkfState out;
  out.theta = state.theta + K * innovation;
  const Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - K * H;
  out.P = symmetrize(ikh * state.P * ikh.transpose() + K * R * K.transpose());  // Joseph form
  out.k = state.k;
  return out;
}

FilterResult run_filter(const std::vector<double>& measurements,
                        const std::vector<double>& jlim_series, const TransitionModel& m,
                        const NoiseConfig& n, double j, const ObservationModel& om) {
  if (measurements.size() != jlim_series.size())
    throw ValidationError("run_filter: measurement and jlim series lengths differ");
  if (measurements.empty()) throw ValidationError("run_filter: empty series");

  FilterResult res;
  res.trace.reserve(measurements.size());

  EkfState state;
  state.theta = n.theta0;
  state.P = n.P0;
  state.k = 0;

  for (std::size_t k = 0; k < measurements.size(); ++k) {
    if (k > 0) state = predict(state, m, n.Q);

    TraceRow row;
    row.k = static_cast<int>(k);
    row.t = static_cast<double>(k);
    double predicted_v = std::numeric_limits<double>::quiet_NaN();
    try {
      predicted_v = observation(state.theta, jlim_series[k], j, om);
    } catch (const NumericalError&) {
    }
    row.predicted_v = predicted_v;
    row.innovation = measurements[k] - predicted_v;

    state = update(state, measurements[k], jlim_series[k], j, om, n.R);
    row.j0 = state.theta[0];
    row.jn = state.theta[1];
    row.r_ohm = state.theta[2];
    res.trace.push_back(row);
  }
  res.final_state = state;
  return res;
}

}  // namespace pemfc
