// Serial reference loops against their OpenMP counterparts. Argument 0 is
// serial, 1 is parallel.
#include <benchmark/benchmark.h>

#include "ishear/dsmc.hpp"
#include "ishear/fourier.hpp"
#include "ishear/moments.hpp"
#include "ishear/profile.hpp"

using namespace ishear;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_Advect(benchmark::State& state) {
  auto e = dsmc::ParticleEnsemble::gaussian(1000000, 3, Mat::Identity(3, 3), 1, 0);
  const Mat A = moments::usf_shear(3, 0.5);
  for (auto _ : state) {
    dsmc::advect(e, A, 1e-3, exec_of(state));
    benchmark::DoNotOptimize(e.v.data());
  }
  state.SetItemsProcessed(state.iterations() * e.N);
}

void BM_MeasureMoments(benchmark::State& state) {
  const auto e = dsmc::ParticleEnsemble::gaussian(1000000, 3, Mat::Identity(3, 3), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(dsmc::measure_moments(e, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * e.N);
}

fourier::GridSpec bench_grid() {
  fourier::GridSpec g;
  g.n_radial = 128;
  g.n_angle = 64;
  return g;
}

void BM_Gain(benchmark::State& state) {
  const auto g = bench_grid();
  const auto phi = fourier::gaussian_grid(g, Mat::Identity(2, 2));
  const auto k = kernel::KernelModel::isotropic(2, 0.9);
  fourier::GainOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fourier::normalized_gain(phi, k, opt));
}

void BM_PicardApply(benchmark::State& state) {
  const auto g = bench_grid();
  const auto k = kernel::KernelModel::isotropic(2, 0.9);
  const Mat A = moments::usf_shear(2, 0.05);
  const auto kc = kernel::derive_constants(k);
  const double beta = moments::find_beta(A, kc).beta;
  fourier::GainOptions opt;
  opt.exec = exec_of(state);
  const fourier::PicardMap P(A, beta, k, g, 40.0, 64, opt);
  const auto phi = fourier::gaussian_grid(g, 0.5 * Mat::Identity(2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(P.apply(phi));
}

}  // namespace

BENCHMARK(BM_Advect)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeasureMoments)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PicardApply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
