#include "gridforge/presets.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace gridforge;

struct Fixture {
  explicit Fixture(const std::string& strategy) {
    PresetOptions o;
    o.strategy = strategy;
    cfg = make_preset("large-disturbance", o);
  }
  ScenarioConfig cfg;
};

const char* kStrategies[] = {"all-sm", "droop", "vsm", "matching", "dvoc"};

void BM_Derivatives(benchmark::State& state) {
  Fixture fx(kStrategies[state.range(0)]);
  System sys(fx.cfg.system);
  const Vector x = initialize_steady_state(sys).x;
  const auto in = sys.default_inputs();
  auto ws = sys.make_workspace();
  Vector dx(x.size());
  for (auto _ : state) {
    sys.derivatives(x, in, ws, dx);
    benchmark::DoNotOptimize(dx.data());
  }
  state.SetLabel(kStrategies[state.range(0)]);
}
BENCHMARK(BM_Derivatives)->DenseRange(0, 4);

void BM_Step(benchmark::State& state) {
  Fixture fx("droop");
  fx.cfg.integrator.method = state.range(0) == 0 ? numerics::Method::kExplicitRk4
                                                 : numerics::Method::kImplicitTrapezoidal;
  if (state.range(0) != 0) fx.cfg.integrator.dt = 1e-4;
  System sys(fx.cfg.system);
  Vector x = initialize_steady_state(sys).x;
  const auto in = sys.default_inputs();
  auto ws = sys.make_workspace();
  numerics::DerivativeFn f = [&](double, const Vector& xx, Vector& d) { sys.derivatives(xx, in, ws, d); };
  numerics::Stepper stepper(fx.cfg.integrator);
  double t = 0.0;
  for (auto _ : state) {
    stepper.step(t, x, f);
    t += fx.cfg.integrator.dt;
    benchmark::DoNotOptimize(x.data());
  }
  state.SetLabel(numerics::to_string(fx.cfg.integrator.method));
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1);

// 100 ms of simulated time including the load step.
void BM_ShortScenario(benchmark::State& state) {
  PresetOptions o;
  o.strategy = "matching";
  o.t_end = 0.2;
  const auto cfg = make_preset("large-disturbance", o);
  for (auto _ : state) {
    auto r = run_scenario(cfg);
    benchmark::DoNotOptimize(r.metrics.nadir);
  }
}
BENCHMARK(BM_ShortScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
