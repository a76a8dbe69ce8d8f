#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gesturegen/common/rng.hpp"
#include "gesturegen/common/strings.hpp"
#include "gesturegen/nn/graph.hpp"
#include "gesturegen/nn/tensor.hpp"

namespace gesturegen::nn {

template <typename T>
using ParamVisitor = std::function<void(const std::string&, Tensor<T>&)>;

template <typename T>
Tensor<T> xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor<T> w(rows, cols);
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (T& x : w.data) x = static_cast<T>(rng.uniform(-s, s));
  return w;
}

template <typename T>
struct Linear {
  Tensor<T> weight;  // in x out
  Tensor<T> bias;    // 1 x out
  bool has_bias = true;

  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng& rng, bool with_bias = true)
      : weight(xavier_init<T>(in, out, rng)),
        bias(1, out, T(0)),
        has_bias(with_bias) {}

  typename Graph<T>::Val forward(Graph<T>& g, typename Graph<T>::Val x,
                                 typename Graph<T>::Val w,
                                 typename Graph<T>::Val b) const {
    auto y = g.matmul(x, w);
    return has_bias ? g.add_row(y, b) : y;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".w", weight);
    if (has_bias) fn(prefix + ".b", bias);
  }
};

template <typename T>
struct LayerNormParams {
  Tensor<T> gain;
  Tensor<T> bias;

  LayerNormParams() = default;
  explicit LayerNormParams(std::size_t dim) : gain(1, dim, T(1)), bias(1, dim, T(0)) {}

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".g", gain);
    fn(prefix + ".b", bias);
  }
};

struct TransformerConfig {
  std::size_t model_dim = 64;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn_dim = 256;
  std::size_t max_dist = 64;   // relative-bias clip distance
  std::size_t context = 500;   // hard upper bound on sequence length
};

// Binds a model's parameter tensors into a graph once per step, so forward
// code can look them up by pointer instead of re-leafing shared tensors.
template <typename T>
class ParamBinding {
 public:
  explicit ParamBinding(Graph<T>& g) : g_(&g) {}

  typename Graph<T>::Val operator()(Tensor<T>& t) {
    for (auto& [ptr, val] : bound_)
      if (ptr == &t) return val;
    auto v = g_->leaf(t);
    bound_.emplace_back(&t, v);
    return v;
  }

 private:
  Graph<T>* g_;
  std::vector<std::pair<Tensor<T>*, typename Graph<T>::Val>> bound_;
};

// One pre-norm encoder layer: self-attention with a learned per-head
// relative-position bias, then a gelu feed-forward, residual around both.
template <typename T>
struct TransformerLayer {
  LayerNormParams<T> norm_attn, norm_ffn;
  Linear<T> wq, wk, wv, wo;
  Linear<T> ff1, ff2;
  Tensor<T> rel_bias;  // heads x (2*max_dist+1), zero-initialized

  TransformerLayer() = default;
  TransformerLayer(const TransformerConfig& cfg, Rng& rng)
      : norm_attn(cfg.model_dim),
        norm_ffn(cfg.model_dim),
        wq(cfg.model_dim, cfg.model_dim, rng),
        wk(cfg.model_dim, cfg.model_dim, rng),
        wv(cfg.model_dim, cfg.model_dim, rng),
        wo(cfg.model_dim, cfg.model_dim, rng),
        ff1(cfg.model_dim, cfg.ffn_dim, rng),
        ff2(cfg.ffn_dim, cfg.model_dim, rng),
        rel_bias(cfg.heads, 2 * cfg.max_dist + 1, T(0)) {}

  void visit(const std::string& p, const ParamVisitor<T>& fn) {
    norm_attn.visit(p + ".norm_attn", fn);
    norm_ffn.visit(p + ".norm_ffn", fn);
    wq.visit(p + ".wq", fn);
    wk.visit(p + ".wk", fn);
    wv.visit(p + ".wv", fn);
    wo.visit(p + ".wo", fn);
    ff1.visit(p + ".ff1", fn);
    ff2.visit(p + ".ff2", fn);
    fn(p + ".rel_bias", rel_bias);
  }
};

template <typename T>
struct TransformerStack {
  TransformerConfig cfg;
  std::vector<TransformerLayer<T>> layers;
  LayerNormParams<T> final_norm;

  TransformerStack() = default;
  TransformerStack(const TransformerConfig& c, Rng& rng)
      : cfg(c), final_norm(c.model_dim) {
    if (c.model_dim % c.heads != 0)
      throw std::invalid_argument("model_dim must be divisible by heads");
    layers.reserve(c.layers);
    for (std::size_t i = 0; i < c.layers; ++i) layers.emplace_back(c, rng);
  }

  void visit(const std::string& p, const ParamVisitor<T>& fn) {
    for (std::size_t i = 0; i < layers.size(); ++i)
      layers[i].visit(cat(p, ".layer", i), fn);
    final_norm.visit(p + ".final_norm", fn);
  }

  // x: (S x model_dim). mask, if given, marks valid frames; masked frames get
  // zero attention weight as keys. Rows of masked frames are still computed
  // but carry no meaning and must be ignored by the caller.
  typename Graph<T>::Val forward(
      Graph<T>& g, ParamBinding<T>& bind, typename Graph<T>::Val x,
      const std::vector<std::uint8_t>* mask = nullptr) {
    const std::size_t S = g.value(x).rows;
    if (S > cfg.context)
      throw std::invalid_argument(
          cat("sequence length ", S, " exceeds context ", cfg.context));
    if (g.value(x).cols != cfg.model_dim)
      throw std::invalid_argument("input dim must equal model_dim");

    const std::size_t hd = cfg.model_dim / cfg.heads;
    const T att_scale = T(1) / static_cast<T>(std::sqrt(double(hd)));

    auto h = x;
    for (auto& layer : layers) {
      auto a = g.layer_norm(h, bind(layer.norm_attn.gain),
                            bind(layer.norm_attn.bias));
      auto q = layer.wq.forward(g, a, bind(layer.wq.weight), bind(layer.wq.bias));
      auto k = layer.wk.forward(g, a, bind(layer.wk.weight), bind(layer.wk.bias));
      auto v = layer.wv.forward(g, a, bind(layer.wv.weight), bind(layer.wv.bias));
      auto table = bind(layer.rel_bias);

      typename Graph<T>::Val ctx{};
      for (std::size_t head = 0; head < cfg.heads; ++head) {
        auto qh = g.slice_cols(q, head * hd, (head + 1) * hd);
        auto kh = g.slice_cols(k, head * hd, (head + 1) * hd);
        auto vh = g.slice_cols(v, head * hd, (head + 1) * hd);
        auto logits = g.scale(g.matmul(qh, g.transpose(kh)), att_scale);
        logits = g.add_relative_bias(logits, table, head);
        auto probs = g.softmax_rows(logits, mask);
        auto ctx_h = g.matmul(probs, vh);
        ctx = (head == 0) ? ctx_h : g.concat_cols(ctx, ctx_h);
      }
      auto att = layer.wo.forward(g, ctx, bind(layer.wo.weight),
                                  bind(layer.wo.bias));
      h = g.add(h, att);

      auto b = g.layer_norm(h, bind(layer.norm_ffn.gain),
                            bind(layer.norm_ffn.bias));
      auto f1 = g.gelu(layer.ff1.forward(g, b, bind(layer.ff1.weight),
                                         bind(layer.ff1.bias)));
      auto f2 = layer.ff2.forward(g, f1, bind(layer.ff2.weight),
                                  bind(layer.ff2.bias));
      h = g.add(h, f2);
    }
    return g.layer_norm(h, bind(final_norm.gain), bind(final_norm.bias));
  }
};

// Fixed sinusoidal embedding of an integer position (diffusion step index).
template <typename T>
Tensor<T> sinusoidal_embedding(std::size_t n, std::size_t dim) {
  Tensor<T> e(1, dim);
  const std::size_t half = dim / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double freq =
        std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(half));
    e.at(0, 2 * i) = static_cast<T>(std::sin(n * freq));
    e.at(0, 2 * i + 1) = static_cast<T>(std::cos(n * freq));
  }
  return e;
}

}  // namespace gesturegen::nn
