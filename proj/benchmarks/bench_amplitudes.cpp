#include <benchmark/benchmark.h>

#include "scatsize/estimator.hpp"
#include "scatsize/special_functions.hpp"

using namespace scatsize;

namespace {

const RealDirection kAlpha(0.6, 0.8, 0.0);

void BM_SphereAmplitude(benchmark::State& state) {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  const double b = (double)state.range(0);
  VarietyDirection beta = make_variety_direction(e1(), e2(), b);
  const std::complex<double> t = beta.dot_real(kAlpha);
  for (auto _ : state) benchmark::DoNotOptimize(sphere_amplitude(sph, t));
}
BENCHMARK(BM_SphereAmplitude)->Arg(5)->Arg(20);

void BM_SurfaceIntegralAmplitude(benchmark::State& state) {
  SphereObstacle sph{1.0, {0, 0, 0}, 3.0};
  VarietyDirection beta = make_variety_direction(e1(), e2(), (double)state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(amplitude_via_surface_integral(sph, kAlpha, beta));
}
BENCHMARK(BM_SurfaceIntegralAmplitude)->Arg(0)->Arg(5);

void BM_BornBox(benchmark::State& state) {
  AnalyticPotential box{AxisBox{{0, 0, 0}, {1, 1, 1}}, 1.0, std::nullopt};
  VarietyDirection beta = make_variety_direction(e1(), e2(), 16.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(born_amplitude(PotentialSpec{box}, kAlpha, beta, 5.0));
}
BENCHMARK(BM_BornBox);

void BM_LegendreScaled(benchmark::State& state) {
  const std::complex<double> z(1.0, 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(legendre_scaled((int)state.range(0), z));
}
BENCHMARK(BM_LegendreScaled)->Arg(200)->Arg(2000);

void BM_AmplitudeFromH(benchmark::State& state) {
  AnalyticPotential ball{Ball{{0, 0, 0}, 1.0}, 0.5, std::nullopt};
  LsSolution sol = solve_lippmann_schwinger(PotentialSpec{ball}, kAlpha, 2.0, {});
  VarietyDirection beta = make_variety_direction(e1(), e2(), (double)state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(amplitude_from_H(sol.H, beta, 2.0));
}
BENCHMARK(BM_AmplitudeFromH)->Arg(0)->Arg(10);

void BM_LippmannSchwingerSolve(benchmark::State& state) {
  AnalyticPotential ball{Ball{{0, 0, 0}, 1.0}, 0.5, std::nullopt};
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_lippmann_schwinger(PotentialSpec{ball}, kAlpha, 2.0, {}));
}
BENCHMARK(BM_LippmannSchwingerSolve);

}  // namespace

BENCHMARK_MAIN();
