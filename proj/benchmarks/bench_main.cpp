#include <benchmark/benchmark.h>

#include <numbers>

#include "swsim/dynamics.hpp"
#include "swsim/integrator.hpp"
#include "swsim/scenario.hpp"
#include "swsim/switching.hpp"

namespace {

swsim::Scenario make_scenario(double tf) {
  swsim::ScenarioConfig cfg = swsim::default_scenario_config(1);
  cfg.integrator.tf = tf;
  return swsim::build_scenario(cfg);
}

void BM_CompactRhs(benchmark::State& state) {
  const auto sc = make_scenario(10.0);
  const auto b = swsim::body_transform(sc.initial);
  const auto& g = sc.family.at(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swsim::compact_rhs(b, g, sc.config.controller, sc.profile, 4.0));
  }
}
BENCHMARK(BM_CompactRhs);

void BM_OriginalRhs(benchmark::State& state) {
  const auto sc = make_scenario(10.0);
  const auto& g = sc.family.at(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swsim::original_rhs(sc.initial, g, sc.config.controller, sc.profile, 4.0));
  }
}
BENCHMARK(BM_OriginalRhs);

void BM_Integrate(benchmark::State& state) {
  const auto sc = make_scenario(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto traj = swsim::integrate(swsim::VectorField::kOriginal, sc.schedule, sc.family,
                                 sc.config.controller, sc.profile, sc.initial, 0.0,
                                 sc.config.integrator.tf, sc.step);
    benchmark::DoNotOptimize(traj.size());
  }
  state.SetLabel("simulated seconds");
}
BENCHMARK(BM_Integrate)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_CheckGujc(benchmark::State& state) {
  const auto sc = make_scenario(10.0);
  const double horizon = static_cast<double>(state.range(0)) * std::numbers::pi;
  for (auto _ : state) {
    benchmark::DoNotOptimize(swsim::check_gujc(sc.schedule, sc.family, sc.gujc, horizon).holds);
  }
}
BENCHMARK(BM_CheckGujc)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_EpsilonBound(benchmark::State& state) {
  const auto sc = make_scenario(10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swsim::epsilon_bound(sc.family, sc.gujc.tau_a).epsilon);
  }
}
BENCHMARK(BM_EpsilonBound);

}  // namespace
BENCHMARK_MAIN();
