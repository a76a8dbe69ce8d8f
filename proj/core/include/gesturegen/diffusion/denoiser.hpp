#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gesturegen/common/rng.hpp"
#include "gesturegen/common/strings.hpp"
#include "gesturegen/nn/adam.hpp"
#include "gesturegen/nn/checkpoint.hpp"
#include "gesturegen/nn/graph.hpp"
#include "gesturegen/nn/layers.hpp"

namespace gesturegen::diffusion {

struct GuidanceParams {
  double gamma = 1.0;   // guidance scale at synthesis
  double p_drop = 0.1;  // conditioning dropout probability during training

  void validate() const {
    if (!(p_drop >= 0.0 && p_drop < 1.0))
      throw std::invalid_argument(cat("p_drop ", p_drop, " out of [0, 1)"));
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
      throw std::invalid_argument(cat("gamma ", gamma, " must be finite and >= 0"));
  }
};

struct DenoiserConfig {
  std::size_t pose_dim = 0;
  std::size_t cond_dim = 1024;
  std::size_t model_dim = 128;
  std::size_t heads = 4;
  std::size_t blocks = 15;        // residual blocks
  std::size_t stack_layers = 3;   // transformers per block
  std::size_t ffn_dim = 512;
  std::size_t max_dist = 64;
  std::size_t step_embed_dim = 64;
  std::size_t context = 100;  // longest window the attention accepts

  nn::TransformerConfig stack_config() const {
    nn::TransformerConfig c;
    c.model_dim = model_dim;
    c.heads = heads;
    c.layers = stack_layers;
    c.ffn_dim = ffn_dim;
    c.max_dist = max_dist;
    c.context = context;
    return c;
  }
};

// Residual noise-prediction network: linear input lift, R residual blocks
// each holding a stack of translation-invariant transformers, a shared
// sinusoidal step embedding projected into every block, an additive
// per-block projection of the 1024-d conditioning, and a skip accumulator
// feeding the output head. Output shape always equals input shape. The
// learned null token stands in for the conditioning when it is dropped, so
// "unconditioned" stays distinguishable from genuinely silent input.
template <typename T>
struct Denoiser {
  struct Block {
    nn::Linear<T> step_proj;
    nn::Linear<T> cond_proj;
    nn::TransformerStack<T> stack;

    Block(const DenoiserConfig& c, Rng& rng)
        : step_proj(c.model_dim, c.model_dim, rng),
          cond_proj(c.cond_dim, c.model_dim, rng),
          stack(c.stack_config(), rng) {}
  };

  DenoiserConfig cfg;
  nn::Linear<T> in_proj;
  nn::Linear<T> step_mlp1, step_mlp2;
  std::vector<Block> blocks;
  nn::Linear<T> out1, out2;
  nn::Tensor<T> null_cond;  // 1 x cond_dim

  Denoiser() = default;
  Denoiser(const DenoiserConfig& c, Rng& rng)
      : cfg(c),
        in_proj(c.pose_dim, c.model_dim, rng),
        step_mlp1(c.step_embed_dim, c.model_dim, rng),
        step_mlp2(c.model_dim, c.model_dim, rng),
        out1(c.model_dim, c.model_dim, rng),
        out2(c.model_dim, c.pose_dim, rng),
        null_cond(1, c.cond_dim) {
    if (c.pose_dim == 0) throw std::invalid_argument("denoiser: pose_dim unset");
    blocks.reserve(c.blocks);
    for (std::size_t i = 0; i < c.blocks; ++i) blocks.emplace_back(c, rng);
    for (auto& x : null_cond.data) x = static_cast<T>(0.02 * rng.normal());
  }

  void collect_params(nn::NamedParams<T>& out) {
    auto add = [&](const std::string& n, nn::Tensor<T>& t) { out.emplace_back(n, &t); };
    in_proj.visit("dn.in", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    step_mlp1.visit("dn.step1", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    step_mlp2.visit("dn.step2", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::string p = cat("dn.block", b);
      blocks[b].step_proj.visit(p + ".step", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
      blocks[b].cond_proj.visit(p + ".cond", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
      blocks[b].stack.visit(p + ".stack", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    }
    out1.visit("dn.out1", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    out2.visit("dn.out2", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    add("dn.null_cond", null_cond);
  }

  // The learned null conditioning, tiled to `frames` rows.
  typename nn::Graph<T>::Val null_rows(nn::Graph<T>& g, nn::ParamBinding<T>& bind,
                                       std::size_t frames) {
    return g.tile_rows(bind(null_cond), frames);
  }

  // x_n: (T x pose_dim) noisy features, n: diffusion step (1-based),
  // cond: (T x cond_dim) conditioning rows (use null_rows when dropped).
  typename nn::Graph<T>::Val forward(nn::Graph<T>& g, nn::ParamBinding<T>& bind,
                                     typename nn::Graph<T>::Val x_n,
                                     std::size_t n,
                                     typename nn::Graph<T>::Val cond) {
    if (g.value(x_n).cols != cfg.pose_dim)
      throw std::invalid_argument(cat("denoiser: input dim ", g.value(x_n).cols,
                                      ", expected ", cfg.pose_dim));
    if (g.value(cond).cols != cfg.cond_dim)
      throw std::invalid_argument(cat("denoiser: conditioning dim ",
                                      g.value(cond).cols, ", expected ",
                                      cfg.cond_dim));
    if (g.value(cond).rows != g.value(x_n).rows)
      throw std::invalid_argument("denoiser: conditioning length mismatch");

    auto emb = g.leaf(nn::sinusoidal_embedding<T>(n, cfg.step_embed_dim));
    auto e = step_mlp2.forward(
        g, g.gelu(step_mlp1.forward(g, emb, bind(step_mlp1.weight), bind(step_mlp1.bias))),
        bind(step_mlp2.weight), bind(step_mlp2.bias));  // 1 x model_dim

    auto h = in_proj.forward(g, x_n, bind(in_proj.weight), bind(in_proj.bias));
    typename nn::Graph<T>::Val skip{};
    const T inv_sqrt2 = static_cast<T>(1.0 / std::sqrt(2.0));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Block& blk = blocks[b];
      auto step_row = blk.step_proj.forward(g, e, bind(blk.step_proj.weight),
                                            bind(blk.step_proj.bias));
      auto u = g.add_row(h, step_row);
      u = g.add(u, blk.cond_proj.forward(g, cond, bind(blk.cond_proj.weight),
                                         bind(blk.cond_proj.bias)));
      auto v = blk.stack.forward(g, bind, u);
      h = g.scale(g.add(h, v), inv_sqrt2);
      skip = (b == 0) ? v : g.add(skip, v);
    }
    // The head reads the skip sum plus the residual stream; block outputs
    // are layer-normalized, so the residual path is what carries the raw
    // input scale that noise prediction is affine in.
    skip = g.add(g.scale(skip, static_cast<T>(1.0 / std::sqrt(double(blocks.size())))), h);
    auto y = g.gelu(out1.forward(g, skip, bind(out1.weight), bind(out1.bias)));
    return out2.forward(g, y, bind(out2.weight), bind(out2.bias));
  }
};

nn::ModelCheckpoint denoiser_checkpoint_header(const DenoiserConfig& c);
DenoiserConfig denoiser_config_from_checkpoint(const nn::ModelCheckpoint& ckpt);

inline nn::ModelCheckpoint denoiser_checkpoint_header(const DenoiserConfig& c) {
  nn::ModelCheckpoint ckpt;
  ckpt.hyper = {{"dn.pose_dim", double(c.pose_dim)},
                {"dn.cond_dim", double(c.cond_dim)},
                {"dn.model_dim", double(c.model_dim)},
                {"dn.heads", double(c.heads)},
                {"dn.blocks", double(c.blocks)},
                {"dn.stack_layers", double(c.stack_layers)},
                {"dn.ffn_dim", double(c.ffn_dim)},
                {"dn.max_dist", double(c.max_dist)},
                {"dn.step_embed_dim", double(c.step_embed_dim)},
                {"dn.context", double(c.context)}};
  return ckpt;
}

inline DenoiserConfig denoiser_config_from_checkpoint(const nn::ModelCheckpoint& ckpt) {
  DenoiserConfig c;
  c.pose_dim = static_cast<std::size_t>(ckpt.hyper_required("dn.pose_dim"));
  c.cond_dim = static_cast<std::size_t>(ckpt.hyper_required("dn.cond_dim"));
  c.model_dim = static_cast<std::size_t>(ckpt.hyper_required("dn.model_dim"));
  c.heads = static_cast<std::size_t>(ckpt.hyper_required("dn.heads"));
  c.blocks = static_cast<std::size_t>(ckpt.hyper_required("dn.blocks"));
  c.stack_layers = static_cast<std::size_t>(ckpt.hyper_required("dn.stack_layers"));
  c.ffn_dim = static_cast<std::size_t>(ckpt.hyper_required("dn.ffn_dim"));
  c.max_dist = static_cast<std::size_t>(ckpt.hyper_required("dn.max_dist"));
  c.step_embed_dim = static_cast<std::size_t>(ckpt.hyper_required("dn.step_embed_dim"));
  c.context = static_cast<std::size_t>(ckpt.hyper_required("dn.context"));
  return c;
}

}  // namespace gesturegen::diffusion
