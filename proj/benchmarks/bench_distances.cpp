#include <benchmark/benchmark.h>

#include "sdist/c2st.hpp"
#include "sdist/embedding.hpp"
#include "sdist/mmd.hpp"
#include "sdist/rng.hpp"
#include "sdist/wasserstein.hpp"

namespace {

using namespace sdist;

SampleSet gaussian(std::int64_t n, std::int64_t d, std::uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  Matrix m = standard_normal_matrix(n, d, rng);
  m.col(0).array() += shift;
  return SampleSet(std::move(m));
}

void BM_Wasserstein1d(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 1, 1), y = gaussian(state.range(0), 1, 2, 1.0);
  const auto a = x.column(0), b = y.column(0);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein::wasserstein_1d(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein1d)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_ExactWasserstein(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 2, 3), y = gaussian(state.range(0), 2, 4, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein::exact_wasserstein(x, y).distance);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactWasserstein)->RangeMultiplier(2)->Range(16, 512)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

void BM_SlicedWasserstein(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 10, 5), y = gaussian(state.range(0), 10, 6, 1.0);
  Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein::sliced_wasserstein(x, y, 2.0, 100, rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SlicedWasserstein)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNLogN);

void BM_SlicedWassersteinSlices(benchmark::State& state) {
  const auto x = gaussian(4000, 10, 5), y = gaussian(4000, 10, 6, 1.0);
  Rng rng(8);
  const auto slices = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein::sliced_wasserstein(x, y, 2.0, slices, rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SlicedWassersteinSlices)->RangeMultiplier(10)->Range(10, 1000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_MmdGaussian(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 10, 9), y = gaussian(state.range(0), 10, 10, 1.0);
  const auto kernel = mmd::KernelSpec::gaussian(5.0);
  for (auto _ : state) benchmark::DoNotOptimize(mmd::mmd2_unbiased(x, y, kernel).mmd_squared);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MmdGaussian)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_MmdHighDim(benchmark::State& state) {
  const auto x = gaussian(2000, state.range(0), 11), y = gaussian(2000, state.range(0), 12, 1.0);
  const auto kernel = mmd::KernelSpec::gaussian(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(mmd::mmd2_unbiased(x, y, kernel).mmd_squared);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MmdHighDim)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_MedianHeuristic(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 10, 13), y = gaussian(state.range(0), 10, 14, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(mmd::median_heuristic(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MedianHeuristic)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_Frechet(benchmark::State& state) {
  const auto x = gaussian(2000, state.range(0), 15), y = gaussian(2000, state.range(0), 16, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(embedding::frechet_distance(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Frechet)->RangeMultiplier(4)->Range(8, 512)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

void BM_C2stKnn(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 10, 17), y = gaussian(state.range(0), 10, 18, 1.0);
  Rng rng(19);
  for (auto _ : state) benchmark::DoNotOptimize(c2st::c2st(x, y, c2st::KnnConfig{5}, 5, rng).accuracy);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_C2stKnn)->RangeMultiplier(2)->Range(250, 2000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_C2stMlp(benchmark::State& state) {
  const auto x = gaussian(state.range(0), 10, 20), y = gaussian(state.range(0), 10, 21, 1.0);
  c2st::MlpConfig config;
  config.epochs = 5;
  Rng rng(22);
  for (auto _ : state) benchmark::DoNotOptimize(c2st::c2st(x, y, config, 5, rng).accuracy);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_C2stMlp)->RangeMultiplier(2)->Range(250, 2000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
