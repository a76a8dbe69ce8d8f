#include <benchmark/benchmark.h>

#include "gesturegen/common/rng.hpp"
#include "gesturegen/diffusion/denoiser.hpp"
#include "gesturegen/nn/layers.hpp"

namespace {

using namespace gesturegen;

void BM_TransformerForward(benchmark::State& state) {
  nn::TransformerConfig cfg;
  cfg.model_dim = 128;
  cfg.heads = 4;
  cfg.layers = 3;
  cfg.ffn_dim = 512;
  cfg.max_dist = 64;
  cfg.context = 512;
  Rng rng(1);
  nn::TransformerStack<float> stack(cfg, rng);
  nn::Tensor<float> x(static_cast<std::size_t>(state.range(0)), cfg.model_dim);
  for (auto& v : x.data) v = static_cast<float>(rng.normal());
  for (auto _ : state) {
    nn::Graph<float> g;
    nn::ParamBinding<float> bind(g);
    auto y = stack.forward(g, bind, g.leaf(x));
    benchmark::DoNotOptimize(g.value(y).data.data());
  }
}
BENCHMARK(BM_TransformerForward)->Arg(100)->Arg(250)->Arg(500);

void BM_DenoiserStep(benchmark::State& state) {
  diffusion::DenoiserConfig cfg;
  cfg.pose_dim = 18;
  cfg.cond_dim = 1024;
  cfg.model_dim = 64;
  cfg.heads = 4;
  cfg.blocks = static_cast<std::size_t>(state.range(0));
  cfg.stack_layers = 3;
  cfg.ffn_dim = 256;
  cfg.max_dist = 64;
  cfg.step_embed_dim = 64;
  cfg.context = 100;
  Rng rng(2);
  diffusion::Denoiser<float> model(cfg, rng);
  nn::Tensor<float> x(100, cfg.pose_dim), c(100, cfg.cond_dim);
  for (auto& v : x.data) v = static_cast<float>(rng.normal());
  for (auto& v : c.data) v = static_cast<float>(rng.normal());
  for (auto _ : state) {
    nn::Graph<float> g;
    nn::ParamBinding<float> bind(g);
    auto y = model.forward(g, bind, g.leaf(x), 25, g.leaf(c));
    benchmark::DoNotOptimize(g.value(y).data.data());
  }
}
BENCHMARK(BM_DenoiserStep)->Arg(3)->Arg(15);

}  // namespace

BENCHMARK_MAIN();
