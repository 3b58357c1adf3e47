#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pemfc/errors.hpp"
#include "pemfc/prognosis.hpp"
#include "pemfc/synthdata.hpp"

using namespace pemfc;

namespace {

// One full database is enough for every training test here.
const Database& database() {
  static const Database db = generate_database(GroundTruth{});
  return db;
}

PrognosisConfig config(int t_n) {
  PrognosisConfig cfg;
  cfg.t_n = t_n;
  cfg.scenario.seed = 42;
  return cfg;
}

// Scenario carrying the true limit-current trajectory past the horizon.
JlimScenario truth_scenario(const GroundTruth& gt, int t_n) {
  JlimScenario sc;
  sc.t_c = static_cast<double>(t_n);
  sc.lambda = 1.0;
  for (int t = t_n + 1; t <= static_cast<int>(gt.t_max); ++t) {
    sc.trajectory.push_back(true_jlim(gt, static_cast<double>(t)));
  }
  return sc;
}

}  // namespace

TEST_SUITE("prognosis") {
  TEST_CASE("eol estimation on simple series") {
    std::vector<double> flat(100, 0.62);
    CHECK_FALSE(estimate_eol(flat, flat[0], 0.90).has_value());

    std::vector<double> drop(40000, 0.62);
    for (size_t t = 35966; t < drop.size(); ++t) drop[t] = 0.5;
    const auto eol = estimate_eol(drop, drop[0], 0.90);
    REQUIRE(eol.has_value());
    CHECK(*eol == 35966);

    CHECK_THROWS_AS(estimate_eol({}, 0.6, 0.9), ValidationError);
  }

  TEST_CASE("rul arithmetic") {
    CHECK(estimate_rul(35966.0, 30000.0) == 5966.0);
    CHECK(estimate_rul(20000.0, 20000.0) == 0.0);
    CHECK(estimate_rul(38000.0, 10000.0) == 28000.0);
    CHECK_THROWS_AS(estimate_rul(29000.0, 30000.0), ValidationError);
  }

  TEST_CASE("error metrics") {
    const std::vector<double> truth = {0.60, 0.59, 0.58, 0.57};
    const Metrics perfect = metrics(truth, truth, 5966.0, 5966.0);
    CHECK(perfect.mape == 0.0);
    CHECK(perfect.ape == 0.0);
    for (const auto& [w, r] : perfect.rmse_by_horizon) CHECK(r == 0.0);

    const Metrics off = metrics(truth, truth, 5000.0, 5966.0);
    CHECK(off.ape == doctest::Approx(100.0 * 966.0 / 5966.0).epsilon(1e-12));

    CHECK_THROWS_AS(metrics({0.6}, {0.6, 0.59}, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(metrics(truth, truth, 1.0, 0.0), ValidationError);
  }

  TEST_CASE("rmse windows grow with the horizon") {
    std::vector<double> truth(3200, 0.6), pred(3200, 0.6);
    for (size_t i = 0; i < pred.size(); ++i) pred[i] += 1e-3 * (i / 3200.0);
    const Metrics m = metrics(pred, truth, 100.0, 100.0);
    REQUIRE(m.rmse_by_horizon.size() == 6);  // 500, 1000, ..., 3000
    CHECK(m.rmse_by_horizon.front().first == 500);
    CHECK(m.rmse_by_horizon.back().first == 3000);
    for (size_t i = 1; i < m.rmse_by_horizon.size(); ++i) {
      CHECK(m.rmse_by_horizon[i].second >= m.rmse_by_horizon[i - 1].second);
    }
    // Short series simply stop early.
    const Metrics s = metrics(std::vector<double>(700, 0.6),
                              std::vector<double>(700, 0.6), 1.0, 1.0);
    CHECK(s.rmse_by_horizon.size() == 1);
  }

  TEST_CASE("training on the early window sees no rupture") {
    const TrainOutput t10k = train(database(), config(10000));
    CHECK_FALSE(t10k.detection.detected);
    CHECK(t10k.fits.size() == 21);  // characterizations at 0..10000 h
    CHECK(t10k.measured_v.size() == 10001);
    CHECK(t10k.jlim_hourly.size() == 10001);
  }

  TEST_CASE("training past the breakpoint detects it") {
    const TrainOutput t35k = train(database(), config(35000));
    REQUIRE(t35k.detection.detected);
    CHECK(std::abs(t35k.detection.t_c - 29400.0) <= 500.0);
  }

  TEST_CASE("trained laws recover the plant coefficients") {
    const GroundTruth gt;
    const TrainOutput t = train(database(), config(30000));
    CHECK(std::abs(t.laws.a0 - gt.a0) / gt.a0 < 1e-3);
    CHECK(std::abs(t.laws.k0 - gt.k0) / gt.k0 < 1e-3);
    CHECK(std::abs(t.laws.an - gt.an) / gt.an < 1e-3);
    CHECK(std::abs(t.laws.kn - gt.kn) / gt.kn < 1e-3);
    CHECK(std::abs(t.laws.r_ohm0 - gt.r_ohm0) / gt.r_ohm0 < 1e-3);
    CHECK(std::abs(t.laws.k_ohm - gt.k_ohm) / gt.k_ohm < 1e-3);
    CHECK(t.obs.beta == doctest::Approx(gt.beta).epsilon(1e-3));
    // The correction pass ends on-model: filtered state close to truth.
    const QuasiStaticParams p30 = true_params(gt, 30000.0);
    CHECK(std::abs(t.final_state.theta(1) - p30.jn) / p30.jn < 1e-2);
  }

  TEST_CASE("training needs enough characterizations") {
    CHECK_THROWS_AS(train(database(), config(800)), ValidationError);
    CHECK_THROWS_AS(train(database(), config(-5)), ValidationError);
  }

  TEST_CASE("oracle scenario reproduces the measured future") {
    // Prediction driven by the true jlim trajectory, zero process noise: the
    // propagated voltage must shadow the plant to sub-millivolt level, and the
    // predicted EOL lands on the planted hour.
    const GroundTruth gt;
    for (int t_n : {10000, 20000, 30000}) {
      PrognosisConfig cfg = config(t_n);
      cfg.q_rel = 0.0;
      const TrainOutput trained = train(database(), cfg);
      const PrognosisResult res =
          predict_with_scenarios(trained, cfg, {truth_scenario(gt, t_n)});
      REQUIRE(res.voltage.size() == 1);
      const auto& pred = res.voltage[0];
      REQUIRE(pred.size() == static_cast<size_t>(38000 - t_n));
      double sse = 0.0;
      for (size_t i = 0; i < pred.size(); ++i) {
        const double truth_v = database().voltage_hourly[t_n + 1 + i];
        sse += (pred[i] - truth_v) * (pred[i] - truth_v);
      }
      const double rmse_v = std::sqrt(sse / pred.size());
      CHECK(rmse_v < 1e-3);
      REQUIRE(res.n_eol_reached == 1);
      CHECK(res.outcomes[0].eol_reached);
      CHECK(res.outcomes[0].t_eol == 35418);
      CHECK(res.rul_median == doctest::Approx(35418.0 - t_n));
    }
  }

  TEST_CASE("quantiles are ordered and bracket the ensemble") {
    const TrainOutput trained = train(database(), config(30000));
    PrognosisConfig cfg = config(30000);
    cfg.scenario.n_scenarios = 25;
    const PrognosisResult res = predict_ensemble(trained, cfg);
    REQUIRE_FALSE(res.quantiles.empty());
    CHECK(res.quantiles.front().t == 30001.0);
    CHECK(res.quantiles.back().t == 38000.0);
    for (const auto& q : res.quantiles) {
      CHECK(q.min <= q.q05);
      CHECK(q.q05 <= q.q25);
      CHECK(q.q25 <= q.median);
      CHECK(q.median <= q.q75);
      CHECK(q.q75 <= q.q95);
      CHECK(q.q95 <= q.max);
      CHECK(q.mean >= q.min - 1e-12);
      CHECK(q.mean <= q.max + 1e-12);
    }
  }

  TEST_CASE("ensemble prediction is deterministic") {
    const TrainOutput trained = train(database(), config(25000));
    PrognosisConfig cfg = config(25000);
    cfg.scenario.n_scenarios = 40;
    const PrognosisResult a = predict_ensemble(trained, cfg);
    const PrognosisResult b = predict_ensemble(trained, cfg);
    CHECK(a.rul_median == b.rul_median);
    CHECK(a.rul_mean == b.rul_mean);
    CHECK(a.n_eol_reached == b.n_eol_reached);
    REQUIRE(a.quantiles.size() == b.quantiles.size());
    for (size_t i = 0; i < a.quantiles.size(); ++i) {
      CHECK(a.quantiles[i].median == b.quantiles[i].median);
    }
  }

  TEST_CASE("median rul is invariant to scenario order") {
    const GroundTruth gt;
    const int t_n = 30000;
    PrognosisConfig cfg = config(t_n);
    cfg.q_rel = 0.0;
    const TrainOutput trained = train(database(), cfg);
    // Three oracle-style scenarios with different rupture sharpness.
    std::vector<JlimScenario> scen;
    for (double factor : {1.0, 1.02, 0.98}) {
      JlimScenario sc = truth_scenario(gt, t_n);
      for (double& v : sc.trajectory) v *= factor;
      scen.push_back(sc);
    }
    const PrognosisResult fwd = predict_with_scenarios(trained, cfg, scen);
    std::reverse(scen.begin(), scen.end());
    const PrognosisResult rev = predict_with_scenarios(trained, cfg, scen);
    CHECK(fwd.rul_median == rev.rul_median);
    CHECK(fwd.rul_mean == rev.rul_mean);
  }
}
