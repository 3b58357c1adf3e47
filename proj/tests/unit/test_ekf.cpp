#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "pemfc/ekf.hpp"
#include "pemfc/electrochem.hpp"
#include "pemfc/errors.hpp"
#include "pemfc/rng.hpp"

using namespace pemfc;

namespace {

Eigen::Vector3d theta_ref() { return {1e-6, 1e-3, 0.1}; }

ObservationModel obs_ref() {
  ObservationModel om;
  om.beta = 0.2;
  return om;
}

// Plain-array reimplementation of one predict + one update, kept free of any
// shared code so the two paths can disagree.
struct DenseRef {
  std::array<double, 3> th;
  std::array<std::array<double, 3>, 3> P;
};

DenseRef dense_step(DenseRef s, const TransitionModel& m, double q, double y, double jlim,
                    double j, const ObservationModel& om, double R) {
  const double F0 = std::exp(-m.k0 * m.dt_norm);
  const double F1 = std::exp(m.kn * m.dt_norm);
  const double F[3] = {F0, F1, 1.0};
  // Predict: theta = F theta + f, P = F P F^T + Q (F diagonal).
  s.th = {F0 * s.th[0], F1 * s.th[1], s.th[2] + m.k_ohm * m.dt_norm};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) s.P[r][c] = F[r] * s.P[r][c] * F[c];
  for (int r = 0; r < 3; ++r) s.P[r][r] += q;
  // Update with the scalar observation.
  const double rt_f = om.constants.rt_f();
  const double predicted = om.constants.E_rev - rt_f * std::log((j + s.th[1]) / s.th[0]) +
                           rt_f / (2.0 * om.beta) * std::log1p(-j / jlim) - s.th[2] * j;
  const double H[3] = {rt_f / s.th[0], -rt_f / (j + s.th[1]), -j};
  double PHt[3] = {0, 0, 0};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) PHt[r] += s.P[r][c] * H[c];
  double S = R;
  for (int r = 0; r < 3; ++r) S += H[r] * PHt[r];
  const double K[3] = {PHt[0] / S, PHt[1] / S, PHt[2] / S};
  const double innov = y - predicted;
  for (int r = 0; r < 3; ++r) s.th[r] += K[r] * innov;
  // Joseph form: (I-KH) P (I-KH)^T + K R K^T.
  std::array<std::array<double, 3>, 3> A{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) A[r][c] = (r == c ? 1.0 : 0.0) - K[r] * H[c];
  std::array<std::array<double, 3>, 3> AP{}, newP{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) AP[r][c] += A[r][k] * s.P[k][c];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 3; ++k) newP[r][c] += AP[r][k] * A[c][k];
      newP[r][c] += K[r] * R * K[c];
    }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) s.P[r][c] = 0.5 * (newP[r][c] + newP[c][r]);
  return s;
}

}  // namespace

TEST_SUITE("ekf") {
  TEST_CASE("prediction without dynamics is the identity") {
    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity() * 0.01;
    TransitionModel m;
    m.k0 = m.kn = m.k_ohm = 0.0;
    const EkfState out = predict(s, m, Eigen::Matrix3d::Zero());
    CHECK(out.theta == s.theta);
    CHECK(out.P == s.P);
    CHECK(out.k == s.k + 1);
  }

  TEST_CASE("ohmic drift accumulates linearly") {
    EkfState s;
    s.theta = theta_ref();
    TransitionModel m;
    m.k_ohm = 0.038;
    m.dt_norm = 1.0 / 38000.0;
    const EkfState out = predict(s, m, Eigen::Matrix3d::Zero());
    CHECK(out.theta(2) == doctest::Approx(0.1 + 1e-6).epsilon(1e-15));
    CHECK(out.theta(0) == s.theta(0));
    CHECK(out.theta(1) == s.theta(1));
  }

  TEST_CASE("transition matrix scales the covariance") {
    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity();
    TransitionModel m;
    m.k0 = std::log(2.0);
    m.kn = std::log(2.0);
    m.dt_norm = 1.0;  // one full normalized unit per step
    const EkfState out = predict(s, m, Eigen::Matrix3d::Zero());
    CHECK(out.theta(0) == doctest::Approx(0.5e-6).epsilon(1e-14));
    CHECK(out.theta(1) == doctest::Approx(2e-3).epsilon(1e-14));
    CHECK(out.P(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.P(1, 1) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(out.P(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out.P(0, 1) == 0.0);
  }

  TEST_CASE("observation agrees with the polarization model") {
    const ObservationModel om = obs_ref();
    CounterRng rng(3, 0);
    for (int i = 0; i < 1000; ++i) {
      QuasiStaticParams p;
      p.j0 = 1e-7 * std::pow(10.0, rng.u01());
      p.jn = 1e-4 * std::pow(10.0, rng.u01());
      p.beta = om.beta;
      p.jlim = 1.3 + 0.6 * rng.u01();
      p.r_ohm = 0.05 + 0.1 * rng.u01();
      const double j = 0.05 + (0.95 * p.jlim - 0.05) * rng.u01();
      const double via_ekf =
          observation({p.j0, p.jn, p.r_ohm}, p.jlim, j, om);
      const double via_model = cell_voltage(j, p, om.constants);
      CHECK(via_ekf == doctest::Approx(via_model).epsilon(1e-15));
    }
  }

  TEST_CASE("observation limiting behaviour") {
    const ObservationModel om = obs_ref();
    // Effectively no mass-transport limit: diffusion term vanishes.
    const double no_diff = observation(theta_ref(), 1e12, 1.0, om);
    const double rt_f = om.constants.rt_f();
    const double expect =
        om.constants.E_rev - rt_f * std::log((1.0 + 1e-3) / 1e-6) - 0.1;
    CHECK(std::abs(no_diff - expect) < 1e-11);
    // Doubling j0 raises the voltage by rt_f * ln 2 exactly.
    Eigen::Vector3d th2 = theta_ref();
    th2(0) *= 2.0;
    CHECK(observation(th2, 1.6, 1.0, om) - observation(theta_ref(), 1.6, 1.0, om) ==
          doctest::Approx(rt_f * std::log(2.0)).epsilon(1e-12));
    // Domain violations surface as numerical errors.
    CHECK_THROWS_AS(observation(theta_ref(), 0.8, 1.0, om), NumericalError);
    CHECK_THROWS_AS(observation({-1e-6, 1e-3, 0.1}, 1.6, 1.0, om), NumericalError);
  }

  TEST_CASE("observation jacobian matches finite differences") {
    const ObservationModel om = obs_ref();
    const double jlim = 1.6, j = 1.0;
    const Eigen::Vector3d th = theta_ref();
    const Eigen::RowVector3d J = observation_jacobian(th, jlim, j, om);
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-6 * th(i);
      Eigen::Vector3d lo = th, hi = th;
      lo(i) -= h;
      hi(i) += h;
      const double fd = (observation(hi, jlim, j, om) - observation(lo, jlim, j, om)) / (2 * h);
      CHECK(J(i) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(J(0) > 0.0);   // more exchange current -> higher voltage
    CHECK(J(1) < 0.0);   // more crossover -> lower voltage
    CHECK(J(2) == -j);   // ohmic term is linear
    const Eigen::RowVector3d J0 = observation_jacobian(th, jlim, 0.0, om);
    CHECK(J0(2) == 0.0);
  }

  TEST_CASE("update with a perfect measurement leaves the state in place") {
    const ObservationModel om = obs_ref();
    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity() * 1e-4;
    const double y = observation(s.theta, 1.6, 1.0, om);
    const EkfState out = update(s, y, 1.6, 1.0, om, 1e-8);
    CHECK(out.theta == s.theta);               // zero innovation moves nothing
    CHECK(out.P.trace() < s.P.trace());        // information still arrives
    CHECK(out.P.isApprox(out.P.transpose()));  // symmetry preserved
  }

  TEST_CASE("an uninformative measurement barely moves the state") {
    const ObservationModel om = obs_ref();
    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity() * 1e-6;
    const double y = observation(s.theta, 1.6, 1.0, om) + 0.05;
    const EkfState out = update(s, y, 1.6, 1.0, om, 1e12);
    CHECK((out.theta - s.theta).norm() < 1e-9);
  }

  TEST_CASE("non-finite measurement passes the state through") {
    const ObservationModel om = obs_ref();
    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity() * 1e-4;
    const EkfState out =
        update(s, std::numeric_limits<double>::quiet_NaN(), 1.6, 1.0, om, 1e-8);
    CHECK(out.theta == s.theta);
    CHECK(out.P == s.P);
  }

  TEST_CASE("update rejects an unevaluable state instead of corrupting it") {
    const ObservationModel om = obs_ref();
    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity() * 1e-4;
    // jlim below the operating current: the observation is undefined, so the
    // step must be a no-op rather than an exception or NaN state.
    const EkfState out = update(s, 0.65, 0.8, 1.0, om, 1e-8);
    CHECK(out.theta == s.theta);
    CHECK(out.P == s.P);
  }

  TEST_CASE("predict plus update matches the dense reference") {
    const ObservationModel om = obs_ref();
    TransitionModel m;
    m.k0 = 1.3;
    m.kn = 1.5;
    m.k_ohm = 0.02;
    const double q = 1e-10, R = 1e-8, jlim = 1.62, j = 1.0;

    EkfState s;
    s.theta = theta_ref();
    s.P = Eigen::Matrix3d::Identity() * 1e-5;
    s.k = 3;
    DenseRef ref{{s.theta(0), s.theta(1), s.theta(2)},
                 {{{1e-5, 0, 0}, {0, 1e-5, 0}, {0, 0, 1e-5}}}};

    const double y = observation(theta_ref(), jlim, j, om) - 2e-3;
    const EkfState pred = predict(s, m, Eigen::Matrix3d::Identity() * q);
    const EkfState out = update(pred, y, jlim, j, om, R);
    const DenseRef refo = dense_step(ref, m, q, y, jlim, j, om, R);

    for (int i = 0; i < 3; ++i) {
      CHECK(out.theta(i) == doctest::Approx(refo.th[i]).epsilon(1e-12));
      for (int c = 0; c < 3; ++c) {
        CHECK(out.P(i, c) == doctest::Approx(refo.P[i][c]).epsilon(1e-12));
      }
    }
    CHECK(out.k == 4);
  }

  TEST_CASE("filter is self-consistent on noise-free data") {
    // Measurements generated by the transition model itself: the filter must
    // track them essentially exactly.
    const ObservationModel om = obs_ref();
    TransitionModel m;
    m.k0 = 1.3;
    m.kn = 1.5;
    m.k_ohm = 0.02;
    const int n = 600;
    const double j = 1.0;
    std::vector<double> y(n), jlim(n, 1.6);
    Eigen::Vector3d th = theta_ref();
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        th(0) *= std::exp(-m.k0 * m.dt_norm);
        th(1) *= std::exp(m.kn * m.dt_norm);
        th(2) += m.k_ohm * m.dt_norm;
      }
      y[k] = observation(th, jlim[k], j, om);
    }
    NoiseConfig nc;
    nc.theta0 = theta_ref();
    nc.P0 = Eigen::Matrix3d::Identity() * 1e-8;
    nc.R = 1e-10;
    const FilterResult res = run_filter(y, jlim, m, nc, j, om);
    REQUIRE(res.trace.size() == static_cast<size_t>(n));
    CHECK(res.final_state.k == n - 1);
    for (int i = 0; i < 3; ++i) {
      CHECK(res.final_state.theta(i) == doctest::Approx(th(i)).epsilon(1e-12));
    }
    // Innovations stay at rounding level throughout.
    for (const auto& row : res.trace) {
      CHECK(std::abs(row.innovation) < 1e-10);
    }
    CHECK(res.trace.front().k == 0);
    CHECK(res.trace.back().t == static_cast<double>(n - 1));
  }

  TEST_CASE("covariance stays symmetric positive semidefinite") {
    const ObservationModel om = obs_ref();
    TransitionModel m;
    m.k0 = 1.3;
    m.kn = 1.5;
    m.k_ohm = 0.02;
    const int n = 2000;
    const double j = 1.0;
    std::vector<double> y(n), jlim(n);
    Eigen::Vector3d th = theta_ref();
    CounterRng rng(5, 0);
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        th(0) *= std::exp(-m.k0 * m.dt_norm);
        th(1) *= std::exp(m.kn * m.dt_norm);
        th(2) += m.k_ohm * m.dt_norm;
      }
      jlim[k] = 1.6 - 1e-5 * k;
      y[k] = observation(th, jlim[k], j, om) + 1e-4 * (rng.u01() - 0.5);
    }
    NoiseConfig nc;
    nc.theta0 = theta_ref() * 1.02;
    nc.P0 = Eigen::Matrix3d::Identity() * 1e-6;
    nc.Q = Eigen::Matrix3d::Identity() * 1e-14;
    nc.R = 1e-8;
    const FilterResult res = run_filter(y, jlim, m, nc, j, om);
    EkfState s;
    s.theta = nc.theta0;
    s.P = nc.P0;
    for (int k = 0; k < n; ++k) {
      if (k > 0) s = predict(s, m, nc.Q);
      s = update(s, y[k], jlim[k], j, om, nc.R);
      CHECK((s.P - s.P.transpose()).lpNorm<Eigen::Infinity>() < 1e-18);
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(s.P);
      CHECK(es.eigenvalues().minCoeff() > -1e-16);
    }
    for (int i = 0; i < 3; ++i) {
      CHECK(res.final_state.theta(i) == doctest::Approx(s.theta(i)).epsilon(1e-15));
    }
  }

  TEST_CASE("crossover error is corrected through the measurement") {
    // jn has its own Jacobian direction at fixed j, so a wrong initial jn is
    // observable and must converge.
    const ObservationModel om = obs_ref();
    TransitionModel m;
    m.k0 = 1.3;
    m.kn = 1.5;
    m.k_ohm = 0.02;
    const int n = 4000;
    const double j = 1.0;
    std::vector<double> y(n), jlim(n, 1.6);
    Eigen::Vector3d th = theta_ref();
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        th(0) *= std::exp(-m.k0 * m.dt_norm);
        th(1) *= std::exp(m.kn * m.dt_norm);
        th(2) += m.k_ohm * m.dt_norm;
      }
      y[k] = observation(th, jlim[k], j, om);
    }
    NoiseConfig nc;
    nc.theta0 = theta_ref();
    nc.theta0(1) *= 1.05;  // only the crossover current is wrong
    nc.P0 = Eigen::Matrix3d::Identity() * 1e-6;
    nc.R = 1e-10;
    const FilterResult res = run_filter(y, jlim, m, nc, j, om);
    const double rel_err = std::abs(res.final_state.theta(1) - th(1)) / th(1);
    CHECK(rel_err < 1e-3);
  }

  TEST_CASE("a null-space offset is invisible to the filter") {
    // At fixed j the observation only sees rt_f*ln(j0) - r*j jointly: scaling
    // j0 and shifting r_ohm by rt_f*ln(scale)/j cancels exactly, so the filter
    // receives identical innovations and cannot repair either component.
    const ObservationModel om = obs_ref();
    TransitionModel m;
    m.k0 = 1.3;
    m.kn = 1.5;
    m.k_ohm = 0.02;
    const double j = 1.0;
    const double scale = 1.05;
    const double shift = om.constants.rt_f() * std::log(scale) / j;

    Eigen::Vector3d base = theta_ref();
    Eigen::Vector3d offset = base;
    offset(0) *= scale;
    offset(2) += shift;
    CHECK(observation(offset, 1.6, j, om) ==
          doctest::Approx(observation(base, 1.6, j, om)).epsilon(1e-15));

    const int n = 1500;
    std::vector<double> y(n), jlim(n, 1.6);
    Eigen::Vector3d th = base;
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        th(0) *= std::exp(-m.k0 * m.dt_norm);
        th(1) *= std::exp(m.kn * m.dt_norm);
        th(2) += m.k_ohm * m.dt_norm;
      }
      y[k] = observation(th, jlim[k], j, om);
    }
    NoiseConfig nc;
    nc.P0 = Eigen::Matrix3d::Identity() * 1e-6;
    nc.R = 1e-10;
    nc.theta0 = base;
    const FilterResult clean = run_filter(y, jlim, m, nc, j, om);
    nc.theta0 = offset;
    const FilterResult shifted = run_filter(y, jlim, m, nc, j, om);

    // The offset run keeps a persistent j0 error of about the injected 5%.
    const double j0_err =
        std::abs(shifted.final_state.theta(0) - clean.final_state.theta(0)) /
        clean.final_state.theta(0);
    CHECK(j0_err > 0.03);
    // Yet the observable combination rt_f*ln(j0) - r*j agrees between runs.
    const auto combo = [&](const EkfState& s) {
      return om.constants.rt_f() * std::log(s.theta(0)) - s.theta(2) * j;
    };
    CHECK(combo(shifted.final_state) ==
          doctest::Approx(combo(clean.final_state)).epsilon(1e-9));
  }

  TEST_CASE("series length mismatch is rejected") {
    const ObservationModel om = obs_ref();
    NoiseConfig nc;
    nc.theta0 = theta_ref();
    CHECK_THROWS_AS(run_filter({0.6, 0.6}, {1.6}, TransitionModel{}, nc, 1.0, om),
                    ValidationError);
    CHECK_THROWS_AS(run_filter({}, {}, TransitionModel{}, nc, 1.0, om), ValidationError);
  }
}
