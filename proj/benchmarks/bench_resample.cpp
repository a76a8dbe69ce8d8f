#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gesturegen/signal/resample.hpp"

namespace {

std::vector<double> tone(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2 * M_PI * 5.0 * static_cast<double>(i) / 50.0);
  return x;
}

void BM_Resample50to30(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto y = gesturegen::sig::resample_rate(x, 50, 30);
    benchmark::DoNotOptimize(y);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Resample50to30)->Arg(500)->Arg(5000)->Arg(50000);

void BM_ResampleColumns(benchmark::State& state) {
  gesturegen::MatrixRM x = gesturegen::MatrixRM::Random(1000, state.range(0));
  for (auto _ : state) {
    auto y = gesturegen::sig::resample_columns(x, 50, 30);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_ResampleColumns)->Arg(64)->Arg(768);

}  // namespace

BENCHMARK_MAIN();
