#include <benchmark/benchmark.h>

#include "lrnr/build_entropy.hpp"
#include "lrnr/harness.hpp"

namespace {

lrnr::EntropyApprox merge_build(std::size_t K) {
  const auto c = lrnr::preset_config("merge_two_shocks");
  return lrnr::build_entropy(c.u0_pc(), c.make_flux_ptr(), c.T, K);
}

std::vector<double> grid(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

void BM_MarchEval(benchmark::State& st) {
  const auto K = static_cast<std::size_t>(st.range(0));
  const auto ea = merge_build(K);
  const auto xs = grid(0.0, 1.0, K), ts = grid(0.0, ea.T(), K);
  for (auto _ : st) benchmark::DoNotOptimize(lrnr::march_eval(ea, xs, ts));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(K * K));
}
BENCHMARK(BM_MarchEval)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMicrosecond);

void BM_HbarPointwise(benchmark::State& st) {
  const auto K = static_cast<std::size_t>(st.range(0));
  const auto ea = merge_build(K);
  double x = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(lrnr::hbar_eval(ea, x, 0.5 * ea.T()));
    x = x > 0.9 ? 0.1 : x + 0.013;
  }
}
BENCHMARK(BM_HbarPointwise)->RangeMultiplier(2)->Range(16, 128);

void BM_ForwardFiveLayer(benchmark::State& st) {
  const auto K = static_cast<std::size_t>(st.range(0));
  const auto ea = merge_build(K);
  const auto model = lrnr::build_5layer_lrnr(ea);
  double x = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(lrnr::forward(model, x, 0.5 * ea.T()));
    x = x > 0.9 ? 0.1 : x + 0.013;
  }
}
BENCHMARK(BM_ForwardFiveLayer)->RangeMultiplier(2)->Range(8, 64);

void BM_BuildEntropy(benchmark::State& st) {
  const auto K = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(merge_build(K));
}
BENCHMARK(BM_BuildEntropy)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
