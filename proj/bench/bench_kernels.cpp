// Serial reference vs OpenMP kernels over realistic vocabulary sizes.
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "swir/kernels.hpp"

namespace {

std::vector<double> random_logits(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

template <double (*Softmax)(std::span<const double>, std::span<double>)>
void BM_softmax(benchmark::State& state) {
  const auto logits = random_logits(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(logits.size());
  for (auto _ : state) benchmark::DoNotOptimize(Softmax(logits, out));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <double (*Entropy)(std::span<const double>)>
void BM_entropy(benchmark::State& state) {
  const auto logits = random_logits(static_cast<std::size_t>(state.range(0)));
  std::vector<double> probs(logits.size());
  swir::kernels::serial::softmax(logits, probs);
  for (auto _ : state) benchmark::DoNotOptimize(Entropy(probs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*RowSum)(std::span<const double>, std::span<const double>, std::size_t, std::span<double>)>
void BM_weighted_row_sum(benchmark::State& state) {
  const auto vocab = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto logits = random_logits(vocab);
  std::vector<double> probs(vocab);
  swir::kernels::serial::softmax(logits, probs);
  const auto table = random_logits(vocab * dim);
  std::vector<double> out(dim);
  for (auto _ : state) {
    RowSum(probs, table, dim, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

using namespace swir::kernels;

BENCHMARK(BM_softmax<serial::softmax>)->Name("softmax/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_softmax<parallel::softmax>)->Name("softmax/parallel")->RangeMultiplier(8)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_entropy<serial::entropy>)->Name("entropy/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_entropy<parallel::entropy>)->Name("entropy/parallel")->RangeMultiplier(8)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_weighted_row_sum<serial::weighted_row_sum>)
    ->Name("row_sum/serial")
    ->Args({32000, 256})
    ->Args({152000, 512});
BENCHMARK(BM_weighted_row_sum<parallel::weighted_row_sum>)
    ->Name("row_sum/parallel")
    ->Args({32000, 256})
    ->Args({152000, 512});

}  // namespace

BENCHMARK_MAIN();
