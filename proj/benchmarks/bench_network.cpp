#include <benchmark/benchmark.h>

#include "ana/network.hpp"
#include "ana/trainer.hpp"

using namespace ana;

namespace {

Network moons_net() {
  Network net = make_mlp({2, {16, 16, 16}, 2, {Quantiser::ternary(), NoiseFamily::uniform}, ActivationSpec{}});
  Rng rng(3);
  net.init_uniform(rng);
  for (std::size_t i : net.quantised_layers()) net.layer(i).noise = {0.0, 0.5};
  return net;
}

Matrix batch(Eigen::Index n) {
  Rng rng(4);
  Matrix x(2, n);
  for (auto& v : x.reshaped()) v = 2.0 * uniform01(rng) - 1.0;
  return x;
}

void BM_Forward(benchmark::State& state) {
  Network net = moons_net();
  const Matrix x = batch(state.range(0));
  const auto strategy = static_cast<ForwardStrategy>(state.range(1));
  std::vector<Rng> rngs(net.depth(), Rng(5));
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, ForwardMode::regularised(strategy), rngs).back().data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetLabel(std::string(to_string(strategy)));
}

void BM_ForwardBackward(benchmark::State& state) {
  Network net = moons_net();
  const Matrix x = batch(state.range(0));
  const Matrix g = Matrix::Ones(2, state.range(0));
  for (auto _ : state) {
    net.forward(x, ForwardMode::regularised(ForwardStrategy::mode));
    benchmark::DoNotOptimize(net.backward(g).weight.front().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ConvForward(benchmark::State& state) {
  Layer conv = Layer::conv2d({3, 16, 16, 8, 3, 1, 1});
  conv.activation = ActivationSpec{Quantiser::ternary(), NoiseFamily::logistic};
  conv.noise = {0.0, 0.3};
  Network net({conv, Layer::dense(conv.out_size, 10)});
  Rng rng(6);
  net.init_uniform(rng);
  Matrix x(static_cast<Eigen::Index>(conv.in_size), state.range(0));
  for (auto& v : x.reshaped()) v = uniform01(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(net.forward(x, ForwardMode::regularised(ForwardStrategy::expectation)).back().data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrainEpoch(benchmark::State& state) {
  Dataset data;
  data.features = batch(800);
  data.labels.resize(800);
  for (std::size_t i = 0; i < 800; ++i) data.labels[i] = data.features(0, static_cast<Eigen::Index>(i)) > 0.0;
  LayerScheduleSpec base;
  const Schedule schedule = build_schedule({}, 3, 25, base);
  TrainConfig c;
  c.epochs = 1;
  c.batch_size = 32;
  for (auto _ : state) benchmark::DoNotOptimize(train(moons_net(), schedule, data, Dataset{Matrix(2, 0), {}, 2}, c));
  state.SetItemsProcessed(state.iterations() * 800);
}

}  // namespace

BENCHMARK(BM_Forward)->ArgsProduct({{32, 256}, {0, 1, 2}});
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(256);
BENCHMARK(BM_ConvForward)->Arg(8);
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);
