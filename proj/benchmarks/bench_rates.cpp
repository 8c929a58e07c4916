#include <benchmark/benchmark.h>

#include "biphoton/gaussian_integral.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/scenarios.hpp"

namespace {

using namespace biphoton;

PumpParams reference_pump() {
  PumpParams p;
  p.delta = CoherenceLength::finite(0.0876e-3);
  return p;
}

void BM_BuildForm(benchmark::State& state) {
  const PumpParams pump = reference_pump();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_quadratic_form(0.0, 10.0, pump, CrystalParams{}, ChannelParams{}));
  }
}
BENCHMARK(BM_BuildForm);

void BM_EngineRate(benchmark::State& state) {
  const PumpParams pump = reference_pump();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate_gaussian_engine(0.0, 10.0, pump, CrystalParams{}, ChannelParams{}));
  }
}
BENCHMARK(BM_EngineRate);

void BM_QuadratureRate(benchmark::State& state) {
  const PumpParams pump = reference_pump();
  const double rel_tol = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rate_quadrature(0.0, 10.0, pump, CrystalParams{}, ChannelParams{}, TurbulenceKernelMode::CrossTerm, rel_tol));
  }
}
BENCHMARK(BM_QuadratureRate)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ScanProfile(benchmark::State& state) {
  const PumpParams pump = reference_pump();
  const DetectorScan scan{0.0, -200.0, 200.0, 201};
  EvalOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_profile(scan, pump, CrystalParams{}, ChannelParams{}, Method::GaussianEngine, options));
  }
}
BENCHMARK(BM_ScanProfile)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
