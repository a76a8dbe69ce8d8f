#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gesturegen/common/matrix.hpp"
#include "gesturegen/common/rng.hpp"
#include "gesturegen/common/strings.hpp"
#include "gesturegen/nn/adam.hpp"
#include "gesturegen/nn/checkpoint.hpp"
#include "gesturegen/nn/graph.hpp"
#include "gesturegen/nn/layers.hpp"

namespace gesturegen::csmp {

// A window is [start, start + len) of the source stream; len < context means
// the stream was shorter than one window and the tail is zero-padded under a
// validity mask.
struct WindowSpec {
  std::size_t start = 0;
  std::size_t len = 0;
};

// Sliding windows with a fixed hop, plus one end-anchored window when the
// last regular window stops short of the end. A stream shorter than the
// context yields a single padded window. Together the windows cover every
// frame.
inline std::vector<WindowSpec> chunk_windows(std::size_t total,
                                             std::size_t context,
                                             std::size_t hop) {
  if (total == 0) throw std::invalid_argument("chunk_windows: empty stream");
  if (hop == 0 || hop > context)
    throw std::invalid_argument("chunk_windows: need 0 < hop <= context");
  std::vector<WindowSpec> out;
  if (total < context) {
    out.push_back({0, total});
    return out;
  }
  std::size_t start = 0;
  for (; start + context <= total; start += hop)
    out.push_back({start, context});
  if (out.back().start + context != total)
    out.push_back({total - context, context});
  return out;
}

struct CsmpConfig {
  std::size_t context = 500;
  std::size_t hop = 250;
  std::size_t input_dim = 1536;  // concatenated audio+text per agent
  std::size_t motion_dim = 0;    // pose feature dim, set from data
  std::size_t model_dim = 256;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn_dim = 1024;
  std::size_t max_dist = 64;
  std::size_t proj_dim = 512;  // two agents concatenate to 1024
  double temp_init = 0.07;
  double temp_min = 0.01;

  nn::TransformerConfig encoder_config() const {
    nn::TransformerConfig c;
    c.model_dim = model_dim;
    c.heads = heads;
    c.layers = layers;
    c.ffn_dim = ffn_dim;
    c.max_dist = max_dist;
    c.context = context;
    return c;
  }
  void validate() const {
    if (hop == 0 || hop > context)
      throw std::invalid_argument("csmp: need 0 < hop <= context");
    if (input_dim == 0 || motion_dim == 0 || proj_dim == 0)
      throw std::invalid_argument("csmp: dims must be positive");
    if (!(temp_init > 0) || !(temp_min > 0))
      throw std::invalid_argument("csmp: temperature must be positive");
  }
};

// Closed-form symmetric contrastive loss, the oracle counterpart of the
// graph-built training loss: logits L = U V^T / temperature, loss =
// (xent(L, diag) + xent(L^T, diag)) / 2.
template <typename T>
T contrastive_loss_value(const nn::Tensor<T>& u, const nn::Tensor<T>& v,
                         T temperature) {
  if (temperature <= T(0))
    throw std::invalid_argument("contrastive loss: temperature must be positive");
  if (u.rows != v.rows || u.cols != v.cols || u.rows == 0)
    throw std::invalid_argument("contrastive loss: shape mismatch");
  const std::size_t b = u.rows;
  std::vector<double> logits(b * b);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < u.cols; ++k)
        dot += double(u.at(i, k)) * double(v.at(j, k));
      logits[i * b + j] = dot / double(temperature);
    }
  auto xent_rows = [&](bool transpose) {
    double acc = 0;
    for (std::size_t i = 0; i < b; ++i) {
      double m = -1e300;
      for (std::size_t j = 0; j < b; ++j)
        m = std::max(m, transpose ? logits[j * b + i] : logits[i * b + j]);
      double sum = 0;
      for (std::size_t j = 0; j < b; ++j)
        sum += std::exp((transpose ? logits[j * b + i] : logits[i * b + j]) - m);
      acc += std::log(sum) + m - logits[i * b + i];
    }
    return acc / double(b);
  };
  return static_cast<T>(0.5 * (xent_rows(false) + xent_rows(true)));
}

// Dual-encoder model: a transformer over concatenated speech+text inputs and
// a transformer over continuous motion vectors (a linear input projection
// replaces any token embedding), projected into one joint space and compared
// under a learnable temperature. Both agents share these weights.
template <typename T>
struct CsmpModel {
  CsmpConfig cfg;
  nn::Linear<T> in_speech_text, in_motion;
  nn::TransformerStack<T> enc_speech_text, enc_motion;
  nn::Tensor<T> proj_speech_text, proj_motion;  // model_dim x proj_dim
  nn::Tensor<T> log_inv_temp;                   // scalar, ln(1/temperature)

  CsmpModel() = default;
  CsmpModel(const CsmpConfig& c, Rng& rng)
      : cfg(c),
        in_speech_text(c.input_dim, c.model_dim, rng),
        in_motion(c.motion_dim, c.model_dim, rng),
        enc_speech_text(c.encoder_config(), rng),
        enc_motion(c.encoder_config(), rng),
        proj_speech_text(nn::xavier_init<T>(c.model_dim, c.proj_dim, rng)),
        proj_motion(nn::xavier_init<T>(c.model_dim, c.proj_dim, rng)),
        log_inv_temp(nn::Tensor<T>::scalar(static_cast<T>(std::log(1.0 / c.temp_init)))) {
    cfg.validate();
  }

  void collect_params(nn::NamedParams<T>& out) {
    auto add = [&](const std::string& name, nn::Tensor<T>& t) {
      out.emplace_back(name, &t);
    };
    in_speech_text.visit("csmp.in_st", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    in_motion.visit("csmp.in_mo", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    enc_speech_text.visit("csmp.enc_st", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    enc_motion.visit("csmp.enc_mo", [&](const std::string& n, nn::Tensor<T>& t) { add(n, t); });
    add("csmp.proj_st", proj_speech_text);
    add("csmp.proj_mo", proj_motion);
    add("csmp.log_inv_temp", log_inv_temp);
  }

  // exp(log_inv_temp) with the temperature floor applied; multiplying the
  // cosine similarities by this realizes division by the temperature.
  typename nn::Graph<T>::Val logit_scale(nn::Graph<T>& g,
                                         nn::ParamBinding<T>& bind) {
    const T cap = static_cast<T>(std::log(1.0 / cfg.temp_min));
    return g.exp(g.clamp_max(bind(log_inv_temp), cap));
  }

  double temperature() const {
    const double s = std::min(double(log_inv_temp.data[0]),
                              std::log(1.0 / cfg.temp_min));
    return std::exp(-s);
  }

  // Pooled unit-norm embedding (1 x proj_dim) and pre-pooling per-frame
  // projections (len x proj_dim) of a speech-text window.
  std::pair<typename nn::Graph<T>::Val, typename nn::Graph<T>::Val>
  encode_speech_text(nn::Graph<T>& g, nn::ParamBinding<T>& bind,
                     const nn::Tensor<T>& window,
                     const std::vector<std::uint8_t>* mask = nullptr) {
    auto x = g.leaf(window);
    auto h = g.add_row(g.matmul(x, bind(in_speech_text.weight)),
                       bind(in_speech_text.bias));
    h = enc_speech_text.forward(g, bind, h, mask);
    auto frames = g.matmul(h, bind(proj_speech_text));
    auto pooled = mask ? g.masked_mean_rows(h, *mask)
                       : g.masked_mean_rows(
                             h, std::vector<std::uint8_t>(window.rows, 1));
    auto u = g.l2_normalize_rows(g.matmul(pooled, bind(proj_speech_text)));
    return {u, frames};
  }

  typename nn::Graph<T>::Val encode_motion(
      nn::Graph<T>& g, nn::ParamBinding<T>& bind, const nn::Tensor<T>& window,
      const std::vector<std::uint8_t>* mask = nullptr) {
    auto x = g.leaf(window);
    auto h = g.add_row(g.matmul(x, bind(in_motion.weight)), bind(in_motion.bias));
    h = enc_motion.forward(g, bind, h, mask);
    auto pooled = mask ? g.masked_mean_rows(h, *mask)
                       : g.masked_mean_rows(
                             h, std::vector<std::uint8_t>(window.rows, 1));
    return g.l2_normalize_rows(g.matmul(pooled, bind(proj_motion)));
  }
};

// One (speech-text, motion) stream pair on a common frame grid.
struct CsmpClip {
  MatrixRM speech_text;  // T x input_dim
  MatrixRM motion;       // T x motion_dim
};

template <typename T>
nn::Tensor<T> window_tensor(const MatrixRM& stream, const WindowSpec& w,
                            std::size_t context) {
  nn::Tensor<T> out(context, static_cast<std::size_t>(stream.cols()), T(0));
  for (std::size_t r = 0; r < w.len; ++r)
    for (std::size_t c = 0; c < out.cols; ++c)
      out.at(r, c) = static_cast<T>(
          stream(static_cast<Eigen::Index>(w.start + r), static_cast<Eigen::Index>(c)));
  return out;
}

struct CsmpTrainConfig {
  std::size_t batch = 8;
  double lr = 1e-3;
};

template <typename T>
class CsmpTrainer {
 public:
  static constexpr std::uint64_t kRngStream = 0xC5;

  CsmpTrainer(CsmpModel<T>& model, std::vector<CsmpClip> clips,
              CsmpTrainConfig train_cfg, std::uint64_t seed)
      : model_(model), clips_(std::move(clips)), train_(train_cfg), seed_(seed) {
    for (std::size_t ci = 0; ci < clips_.size(); ++ci) {
      if (clips_[ci].speech_text.rows() != clips_[ci].motion.rows())
        throw std::invalid_argument("csmp trainer: stream lengths differ");
      const auto windows =
          chunk_windows(static_cast<std::size_t>(clips_[ci].speech_text.rows()),
                        model_.cfg.context, model_.cfg.hop);
      for (const WindowSpec& w : windows) windows_.emplace_back(ci, w);
      windows_per_clip_.push_back(windows.size());
    }
    if (windows_.size() < train_.batch)
      throw std::invalid_argument(
          cat("csmp trainer: batch ", train_.batch, " exceeds ",
              windows_.size(), " available windows"));
    model_.collect_params(params_);
  }

  std::uint64_t step_count() const { return step_; }
  void set_step_count(std::uint64_t s) { step_ = s; }
  void set_learning_rate(double lr) { train_.lr = lr; }
  nn::AdamState<T>& optimizer_state() { return opt_; }
  const nn::NamedParams<T>& params() const { return params_; }

  // One optimizer step over a batch of window pairs drawn across distinct
  // clips (falling back to repeats when there are fewer clips than batch
  // items). Returns the loss.
  T step() {
    Rng rng = derive_rng(seed_, kRngStream, step_);
    const auto batch = sample_batch(rng);

    nn::Graph<T> g;
    g.set_check_finite(true);
    nn::ParamBinding<T> bind(g);
    std::vector<typename nn::Graph<T>::Val> us, vs;
    for (const auto& [clip_idx, w] : batch) {
      const CsmpClip& clip = clips_[clip_idx];
      const auto st = window_tensor<T>(clip.speech_text, w, model_.cfg.context);
      const auto mo = window_tensor<T>(clip.motion, w, model_.cfg.context);
      std::vector<std::uint8_t> mask(model_.cfg.context, 1);
      const bool padded = w.len < model_.cfg.context;
      if (padded)
        for (std::size_t r = w.len; r < mask.size(); ++r) mask[r] = 0;
      us.push_back(model_.encode_speech_text(g, bind, st, padded ? &mask : nullptr).first);
      vs.push_back(model_.encode_motion(g, bind, mo, padded ? &mask : nullptr));
    }
    auto u = g.stack_rows(us);
    auto v = g.stack_rows(vs);
    auto logits = g.mul_scalar(g.matmul(u, g.transpose(v)),
                               model_.logit_scale(g, bind));
    auto loss = g.scale(g.add(g.softmax_xent_diag(logits),
                              g.softmax_xent_diag(g.transpose(logits))),
                        T(0.5));
    g.backward(loss);

    std::map<std::string, nn::Tensor<T>> grads;
    for (auto& [name, tensor] : params_) grads[name] = g.grad(bind(*tensor));
    nn::AdamConfig<T> acfg;
    acfg.lr = static_cast<T>(train_.lr);
    nn::adam_step(params_, grads, opt_, acfg);
    ++step_;
    return g.value(loss).data[0];
  }

  // step<TAB>loss<TAB>temperature per line.
  void train(std::size_t steps, std::ostream* log) {
    for (std::size_t i = 0; i < steps; ++i) {
      const T loss = step();
      if (log) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%llu\t%.9g\t%.9g\n",
                      static_cast<unsigned long long>(step_), double(loss),
                      model_.temperature());
        (*log) << buf;
      }
    }
  }

 private:
  CsmpModel<T>& model_;
  std::vector<CsmpClip> clips_;
  CsmpTrainConfig train_;
  std::uint64_t seed_;
  std::uint64_t step_ = 0;
  std::vector<std::pair<std::size_t, WindowSpec>> windows_;
  std::vector<std::size_t> windows_per_clip_;
  nn::NamedParams<T> params_;
  nn::AdamState<T> opt_;

  std::vector<std::pair<std::size_t, WindowSpec>> sample_batch(Rng& rng) {
    // Shuffled clip order, one random window per visited clip; near-duplicate
    // windows of one utterance never compete within a batch unless there are
    // fewer clips than batch items.
    std::vector<std::size_t> order(clips_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);
    std::vector<std::pair<std::size_t, WindowSpec>> batch;
    std::size_t pos = 0;
    while (batch.size() < train_.batch) {
      const std::size_t clip = order[pos % order.size()];
      ++pos;
      std::size_t base = 0;
      for (std::size_t c = 0; c < clip; ++c) base += windows_per_clip_[c];
      const std::size_t pick = base + rng.uniform_int(windows_per_clip_[clip]);
      batch.push_back(windows_[pick]);
    }
    return batch;
  }
};

// Frozen-model retrieval: fraction of pairs whose speech-text embedding is
// nearest to its own motion embedding within the group.
template <typename T>
double retrieval_accuracy(CsmpModel<T>& model,
                          const std::vector<CsmpClip>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("retrieval: no pairs");
  nn::Graph<T> g;
  nn::ParamBinding<T> bind(g);
  std::vector<nn::Tensor<T>> us, vs;
  for (const CsmpClip& p : pairs) {
    const WindowSpec w{0, std::min<std::size_t>(
                              static_cast<std::size_t>(p.speech_text.rows()),
                              model.cfg.context)};
    const auto st = window_tensor<T>(p.speech_text, w, model.cfg.context);
    const auto mo = window_tensor<T>(p.motion, w, model.cfg.context);
    std::vector<std::uint8_t> mask(model.cfg.context, 1);
    const bool padded = w.len < model.cfg.context;
    if (padded)
      for (std::size_t r = w.len; r < mask.size(); ++r) mask[r] = 0;
    us.push_back(g.value(
        model.encode_speech_text(g, bind, st, padded ? &mask : nullptr).first));
    vs.push_back(g.value(model.encode_motion(g, bind, mo, padded ? &mask : nullptr)));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    std::size_t best = 0;
    double best_dot = -1e300;
    for (std::size_t j = 0; j < vs.size(); ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < us[i].cols; ++k)
        dot += double(us[i].data[k]) * double(vs[j].data[k]);
      if (dot > best_dot) {
        best_dot = dot;
        best = j;
      }
    }
    hits += (best == i);
  }
  return static_cast<double>(hits) / static_cast<double>(us.size());
}

// Per-frame conditioning: windowed pre-pooling encoder features projected to
// proj_dim per agent, overlap-averaged across windows, main agent first.
template <typename T>
MatrixRM conditioning_features(CsmpModel<T>& model, const MatrixRM& main_st,
                               const MatrixRM& interloc_st) {
  if (main_st.rows() != interloc_st.rows())
    throw std::invalid_argument("conditioning: agent stream lengths differ");
  const auto total = static_cast<std::size_t>(main_st.rows());
  const std::size_t proj = model.cfg.proj_dim;
  MatrixRM out = MatrixRM::Zero(static_cast<Eigen::Index>(total),
                                static_cast<Eigen::Index>(2 * proj));
  std::vector<double> count(total, 0.0);

  const auto windows = chunk_windows(total, model.cfg.context, model.cfg.hop);
  for (const WindowSpec& w : windows) {
    nn::Graph<T> g;
    nn::ParamBinding<T> bind(g);
    std::vector<std::uint8_t> mask(model.cfg.context, 1);
    const bool padded = w.len < model.cfg.context;
    if (padded)
      for (std::size_t r = w.len; r < mask.size(); ++r) mask[r] = 0;
    const auto st = window_tensor<T>(main_st, w, model.cfg.context);
    const auto il = window_tensor<T>(interloc_st, w, model.cfg.context);
    const auto main_frames =
        g.value(model.encode_speech_text(g, bind, st, padded ? &mask : nullptr).second);
    const auto il_frames =
        g.value(model.encode_speech_text(g, bind, il, padded ? &mask : nullptr).second);
    for (std::size_t r = 0; r < w.len; ++r) {
      const auto row = static_cast<Eigen::Index>(w.start + r);
      for (std::size_t c = 0; c < proj; ++c) {
        out(row, static_cast<Eigen::Index>(c)) += double(main_frames.at(r, c));
        out(row, static_cast<Eigen::Index>(proj + c)) += double(il_frames.at(r, c));
      }
      count[w.start + r] += 1.0;
    }
  }
  for (std::size_t r = 0; r < total; ++r)
    out.row(static_cast<Eigen::Index>(r)) /= count[r];
  return out;
}

// Checkpoint packing. Optimizer moments ride along under reserved prefixes
// so a resumed run continues exactly.
template <typename T>
nn::ModelCheckpoint csmp_to_checkpoint(CsmpModel<T>& model,
                                       const nn::NamedParams<T>& params,
                                       const nn::AdamState<T>& opt,
                                       std::uint64_t step, std::uint64_t seed) {
  nn::ModelCheckpoint ckpt;
  ckpt.step = step;
  ckpt.seed = seed;
  const CsmpConfig& c = model.cfg;
  ckpt.hyper = {{"csmp.context", double(c.context)},
                {"csmp.hop", double(c.hop)},
                {"csmp.input_dim", double(c.input_dim)},
                {"csmp.motion_dim", double(c.motion_dim)},
                {"csmp.model_dim", double(c.model_dim)},
                {"csmp.heads", double(c.heads)},
                {"csmp.layers", double(c.layers)},
                {"csmp.ffn_dim", double(c.ffn_dim)},
                {"csmp.max_dist", double(c.max_dist)},
                {"csmp.proj_dim", double(c.proj_dim)},
                {"csmp.temp_init", c.temp_init},
                {"csmp.temp_min", c.temp_min},
                {"opt.t", double(opt.t)}};
  for (const auto& [name, tensor] : params)
    ckpt.params[name] = tensor->template cast<float>();
  for (const auto& [name, m] : opt.m) ckpt.params["opt.m/" + name] = m.template cast<float>();
  for (const auto& [name, v] : opt.v) ckpt.params["opt.v/" + name] = v.template cast<float>();
  return ckpt;
}

inline CsmpConfig csmp_config_from_checkpoint(const nn::ModelCheckpoint& ckpt) {
  CsmpConfig c;
  c.context = static_cast<std::size_t>(ckpt.hyper_required("csmp.context"));
  c.hop = static_cast<std::size_t>(ckpt.hyper_required("csmp.hop"));
  c.input_dim = static_cast<std::size_t>(ckpt.hyper_required("csmp.input_dim"));
  c.motion_dim = static_cast<std::size_t>(ckpt.hyper_required("csmp.motion_dim"));
  c.model_dim = static_cast<std::size_t>(ckpt.hyper_required("csmp.model_dim"));
  c.heads = static_cast<std::size_t>(ckpt.hyper_required("csmp.heads"));
  c.layers = static_cast<std::size_t>(ckpt.hyper_required("csmp.layers"));
  c.ffn_dim = static_cast<std::size_t>(ckpt.hyper_required("csmp.ffn_dim"));
  c.max_dist = static_cast<std::size_t>(ckpt.hyper_required("csmp.max_dist"));
  c.proj_dim = static_cast<std::size_t>(ckpt.hyper_required("csmp.proj_dim"));
  c.temp_init = ckpt.hyper_required("csmp.temp_init");
  c.temp_min = ckpt.hyper_required("csmp.temp_min");
  return c;
}

template <typename T>
void load_params_from_checkpoint(const nn::ModelCheckpoint& ckpt,
                                 const nn::NamedParams<T>& params,
                                 nn::AdamState<T>* opt) {
  for (auto& [name, tensor] : params) {
    const nn::Tensor<float>& stored = ckpt.param_required(name);
    if (stored.rows != tensor->rows || stored.cols != tensor->cols)
      throw std::runtime_error(cat("checkpoint parameter '", name,
                                   "' has shape ", stored.rows, "x", stored.cols,
                                   ", expected ", tensor->rows, "x", tensor->cols));
    *tensor = stored.template cast<T>();
  }
  if (opt) {
    opt->t = static_cast<std::uint64_t>(ckpt.hyper_or("opt.t", 0.0));
    for (auto& [name, tensor] : params) {
      auto m = ckpt.params.find("opt.m/" + name);
      auto v = ckpt.params.find("opt.v/" + name);
      if (m != ckpt.params.end()) opt->m[name] = m->second.template cast<T>();
      if (v != ckpt.params.end()) opt->v[name] = v->second.template cast<T>();
    }
  }
}

// Restores a trained model (and optionally the optimizer) from a checkpoint.
// Tensor copies move with the returned value; re-run collect_params on the
// returned instance if parameter pointers are needed.
template <typename T>
CsmpModel<T> csmp_from_checkpoint(const nn::ModelCheckpoint& ckpt,
                                  nn::AdamState<T>* opt = nullptr) {
  Rng rng(0);  // initializer values are overwritten below
  CsmpModel<T> model(csmp_config_from_checkpoint(ckpt), rng);
  nn::NamedParams<T> params;
  model.collect_params(params);
  load_params_from_checkpoint(ckpt, params, opt);
  return model;
}

}  // namespace gesturegen::csmp
