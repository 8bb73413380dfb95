#include <benchmark/benchmark.h>

#include <cmath>

#include "optomech/interferometer.hpp"
#include "optomech/state_prep.hpp"

using namespace optomech;

namespace {

const FockVector kGround = basis_state(0, 1);

void BM_CoherentState(benchmark::State& state) {
  const Complex alpha(double(state.range(0)) / 2.0, 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(coherent_state(alpha, TruncationPolicy::adaptive()));
}
BENCHMARK(BM_CoherentState)->Arg(2)->Arg(4)->Arg(8);

void BM_DisplacementOperator(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(displacement_operator(1.5, dim));
}
BENCHMARK(BM_DisplacementOperator)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_OutState(benchmark::State& state) {
  const SystemParams p = SystemParams::make(1.2, 1.0, 2.0);
  const PhotonWaveform wf = PhotonWaveform::exponential(2.0);
  const double t = state.range(0) * M_PI / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(out_state(t, 0.1, wf, p, kGround));
}
BENCHMARK(BM_OutState)->Arg(1)->Arg(4)->Arg(8);

void BM_ProbabilityAudit(benchmark::State& state) {
  const SystemParams p = SystemParams::make(2.0, 1.0, 2.0);
  const PhotonWaveform wf = PhotonWaveform::exponential(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(probability_audit(2.0 * M_PI, wf, p, kGround));
}
BENCHMARK(BM_ProbabilityAudit);

void BM_VisibilitySeries(benchmark::State& state) {
  const SystemParams p = SystemParams::make(2.0, 1.0, 2.0);
  const PhotonWaveform wf = PhotonWaveform::exponential(2.0);
  const std::vector<double> grid = default_tau_grid();
  for (auto _ : state) benchmark::DoNotOptimize(visibility_series(wf, p, kGround, grid));
}
BENCHMARK(BM_VisibilitySeries);

void BM_ConditionalState(benchmark::State& state) {
  const double g = 3.0 / (2.0 * M_PI);
  const SystemParams p = SystemParams::make(1.0, g, g);
  const PhotonWaveform wf = fock_prep_waveform(1, 1.0, g);
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_state(2.0 * M_PI, wf, p, kGround));
}
BENCHMARK(BM_ConditionalState);

void BM_SubspaceMin(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  OptimizerConfig cfg;
  cfg.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(min_success_over_subspace(j, 1.2, 0.1, cfg));
}
BENCHMARK(BM_SubspaceMin)->Arg(1)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
