#include <benchmark/benchmark.h>

#include <vector>

#include "ana/regulariser.hpp"

using namespace ana;

namespace {

std::vector<double> inputs(std::size_t n) {
  Rng rng(1);
  std::vector<double> x(n);
  for (auto& v : x) v = 4.0 * uniform01(rng) - 2.0;
  return x;
}

RegularisedActivation activation(NoiseFamily f, ForwardStrategy s) {
  return {Quantiser::ternary(), f, {0.0, 0.3}, s};
}

void BM_Expectation(benchmark::State& state) {
  const auto a = activation(static_cast<NoiseFamily>(state.range(0)), ForwardStrategy::expectation);
  const auto xs = inputs(4096);
  for (auto _ : state)
    for (double x : xs) benchmark::DoNotOptimize(expectation_forward(a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  state.SetLabel(std::string(to_string(a.family)));
}

void BM_Backward(benchmark::State& state) {
  const auto a = activation(static_cast<NoiseFamily>(state.range(0)), ForwardStrategy::expectation);
  const auto xs = inputs(4096);
  for (auto _ : state)
    for (double x : xs) benchmark::DoNotOptimize(backward(a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  state.SetLabel(std::string(to_string(a.family)));
}

void BM_Mode(benchmark::State& state) {
  const auto a = activation(static_cast<NoiseFamily>(state.range(0)), ForwardStrategy::mode);
  const auto xs = inputs(4096);
  for (auto _ : state)
    for (double x : xs) benchmark::DoNotOptimize(mode_forward(a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  state.SetLabel(std::string(to_string(a.family)));
}

void BM_Random(benchmark::State& state) {
  const auto a = activation(static_cast<NoiseFamily>(state.range(0)), ForwardStrategy::random);
  const auto xs = inputs(4096);
  Rng rng(2);
  for (auto _ : state)
    for (double x : xs) benchmark::DoNotOptimize(random_forward(a, x, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  state.SetLabel(std::string(to_string(a.family)));
}

}  // namespace

BENCHMARK(BM_Expectation)->DenseRange(0, 3);
BENCHMARK(BM_Backward)->DenseRange(0, 3);
BENCHMARK(BM_Mode)->DenseRange(0, 3);
BENCHMARK(BM_Random)->DenseRange(0, 3);
