#include <benchmark/benchmark.h>

#include "sectar/rng.hpp"
#include "sectar/tensor.hpp"

namespace {

sectar::Tensor random_matrix(int r, int c, sectar::Rng& rng) {
  sectar::Tensor t({r, c});
  for (int i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(-1.0, 1.0);
  return t;
}

void bm_matmul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  sectar::Rng rng(1);
  sectar::Tensor a = random_matrix(16, n, rng);
  sectar::Tensor b = random_matrix(n, 4 * n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sectar::ops::matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations());
}

BENCHMARK(bm_matmul)->Arg(64)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
