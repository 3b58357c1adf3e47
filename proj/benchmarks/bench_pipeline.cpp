// Microbenchmarks for the stages that dominate a full prognosis run.

#include <benchmark/benchmark.h>

#include <vector>

#include "pemfc/changepoint.hpp"
#include "pemfc/electrochem.hpp"
#include "pemfc/identification.hpp"
#include "pemfc/prognosis.hpp"
#include "pemfc/scenario.hpp"
#include "pemfc/synthdata.hpp"

namespace {

using namespace pemfc;

const GroundTruth& gt() {
  static const GroundTruth g;
  return g;
}

const Database& db() {
  static const Database d = generate_database(gt());
  return d;
}

const TrainOutput& trained30k() {
  static const TrainOutput t = [] {
    PrognosisConfig cfg;
    cfg.t_n = 30000;
    return train(db(), cfg);
  }();
  return t;
}

void BM_cell_voltage(benchmark::State& state) {
  const QuasiStaticParams p = true_params(gt(), 20000.0);
  const PhysicalConstants c;
  double j = 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cell_voltage(j, p, c));
    j = (j < 1.5) ? j + 1e-4 : 0.02;
  }
}
BENCHMARK(BM_cell_voltage);

void BM_fit_single_curve(benchmark::State& state) {
  const PolarizationCurve& curve = db().curves[40];
  const PhysicalConstants c;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_single_curve(curve, c, default_init(curve), true));
  }
}
BENCHMARK(BM_fit_single_curve);

void BM_interpolate_and_detect(benchmark::State& state) {
  std::vector<std::pair<double, double>> knots;
  for (const auto& c : db().curves)
    if (c.t <= 30000.0) knots.emplace_back(c.t, true_jlim(gt(), c.t));
  for (auto _ : state) {
    const std::vector<double> hourly = interpolate_jlim_hourly(knots, 30000);
    benchmark::DoNotOptimize(detect_change(hourly));
  }
}
BENCHMARK(BM_interpolate_and_detect);

void BM_ekf_learning_pass(benchmark::State& state) {
  const TrainOutput& t = trained30k();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_filter(t.measured_v, t.jlim_hourly, t.transition,
                                        t.noise, 1.0, t.obs));
  }
}
BENCHMARK(BM_ekf_learning_pass);

void BM_generate_scenarios(benchmark::State& state) {
  const TrainOutput& t = trained30k();
  const LearningCurve learning{t.spline, t.detection, t.jlim_hourly};
  ScenarioConfig cfg;
  cfg.t_n = 30000;
  cfg.n_scenarios = static_cast<int>(state.range(0));
  cfg.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_scenarios(learning, cfg));
  }
}
BENCHMARK(BM_generate_scenarios)->Arg(100)->Arg(500);

void BM_predict_ensemble(benchmark::State& state) {
  const TrainOutput& t = trained30k();
  PrognosisConfig cfg;
  cfg.t_n = 30000;
  cfg.scenario.n_scenarios = static_cast<int>(state.range(0));
  cfg.scenario.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_ensemble(t, cfg));
  }
}
BENCHMARK(BM_predict_ensemble)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
