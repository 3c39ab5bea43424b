#include <benchmark/benchmark.h>

#include <vector>

#include "desc/models.hpp"
#include "desc/rng.hpp"
#include "desc/tensor.hpp"

namespace {

using namespace desc::models;

std::vector<std::vector<double>> sequence(std::size_t len, std::size_t dim,
                                          desc::Rng& rng) {
  std::vector<std::vector<double>> steps(len, std::vector<double>(dim));
  for (auto& step : steps) {
    for (double& v : step) v = rng.uniform(-1.0, 1.0);
  }
  return steps;
}

ModelConfig sequence_config(std::size_t hidden) {
  ModelConfig cfg;
  cfg.classes = 2;
  cfg.embedding_dim = 50;
  cfg.hidden_dim = hidden;
  cfg.mid_dense_dim = 2 * hidden;
  cfg.max_seq_len = 50;
  return cfg;
}

void BilstmForward(benchmark::State& state) {
  desc::Rng rng(1);
  BilstmModel model(sequence_config(static_cast<std::size_t>(state.range(0))), rng);
  const auto steps = sequence(30, 50, rng);
  for (auto _ : state) {
    auto probs = model.predict(steps);
    benchmark::DoNotOptimize(probs);
  }
}
BENCHMARK(BilstmForward)->Arg(16)->Arg(64);

void AttentionForward(benchmark::State& state) {
  desc::Rng rng(2);
  AttentionLstmModel model(sequence_config(static_cast<std::size_t>(state.range(0))),
                           rng);
  const auto steps = sequence(30, 50, rng);
  for (auto _ : state) {
    auto probs = model.predict(steps);
    benchmark::DoNotOptimize(probs);
  }
}
BENCHMARK(AttentionForward)->Arg(16)->Arg(64);

void DnnForward(benchmark::State& state) {
  desc::Rng rng(3);
  ModelConfig cfg;
  cfg.classes = 2;
  cfg.input_dim = static_cast<std::size_t>(state.range(0));
  DnnModel model(cfg, rng);
  std::vector<double> input(cfg.input_dim);
  for (double& v : input) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    auto probs = model.predict(input);
    benchmark::DoNotOptimize(probs);
  }
}
BENCHMARK(DnnForward)->Arg(512)->Arg(2048);

void BilstmTrainStep(benchmark::State& state) {
  desc::Rng rng(4);
  BilstmModel model(sequence_config(16), rng);
  const auto steps = sequence(30, 50, rng);
  auto params = model.parameters();
  for (auto _ : state) {
    for (auto& p : params) p.tensor.zero_grad();
    desc::autodiff::backward(model.loss_graph(steps, 1));
    benchmark::DoNotOptimize(params);
  }
}
BENCHMARK(BilstmTrainStep);

}  // namespace
