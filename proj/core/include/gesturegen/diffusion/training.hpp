#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "gesturegen/common/matrix.hpp"
#include "gesturegen/common/rng.hpp"
#include "gesturegen/csmp/csmp.hpp"  // chunk_windows, window_tensor
#include "gesturegen/diffusion/denoiser.hpp"
#include "gesturegen/diffusion/schedule.hpp"
#include "gesturegen/nn/adam.hpp"

namespace gesturegen::diffusion {

// One training clip: pose features (already standardized) plus the matching
// conditioning stream on the same frame grid.
struct DiffusionClip {
  MatrixRM x0;    // T x pose_dim
  MatrixRM cond;  // T x cond_dim
};

struct DiffusionTrainConfig {
  std::size_t batch = 16;
  double lr = 1e-4;
  std::size_t window = 100;  // T_w; training uses equal-length windows only
};

// Noise-prediction trainer. Model must expose forward(graph, binding, x_n,
// n, cond) and null_rows(graph, binding, frames); tests substitute
// fixed-output doubles through the same interface.
template <typename T, typename Model = Denoiser<T>>
class DiffusionTrainer {
 public:
  static constexpr std::uint64_t kRngStream = 0xD1F;

  struct BatchItem {
    nn::Tensor<T> x0;
    nn::Tensor<T> cond;
  };

  DiffusionTrainer(Model& model, nn::NamedParams<T> params,
                   std::vector<DiffusionClip> clips, NoiseSchedule schedule,
                   GuidanceParams guidance, DiffusionTrainConfig cfg,
                   std::uint64_t seed)
      : model_(model),
        params_(std::move(params)),
        schedule_(std::move(schedule)),
        guidance_(guidance),
        cfg_(cfg),
        seed_(seed) {
    guidance_.validate();
    schedule_.validate();
    for (const DiffusionClip& clip : clips) {
      if (clip.x0.rows() != clip.cond.rows())
        throw std::invalid_argument("diffusion clip: stream lengths differ");
      if (static_cast<std::size_t>(clip.x0.rows()) < cfg_.window) continue;
      const auto windows = csmp::chunk_windows(
          static_cast<std::size_t>(clip.x0.rows()), cfg_.window,
          std::max<std::size_t>(1, cfg_.window / 2));
      for (const auto& w : windows) {
        BatchItem item;
        item.x0 = csmp::window_tensor<T>(clip.x0, w, cfg_.window);
        item.cond = csmp::window_tensor<T>(clip.cond, w, cfg_.window);
        items_.push_back(std::move(item));
      }
    }
    if (items_.size() < 1)
      throw std::invalid_argument(
          "diffusion trainer: no clip is as long as the training window");
  }

  std::uint64_t step_count() const { return step_; }
  void set_step_count(std::uint64_t s) { step_ = s; }
  void set_learning_rate(double lr) { cfg_.lr = lr; }
  nn::AdamState<T>& optimizer_state() { return opt_; }
  const nn::NamedParams<T>& params() const { return params_; }
  const std::vector<BatchItem>& items() const { return items_; }

  // Deterministic core: given the batch, per-item steps, noises and dropout
  // decisions, runs forward/backward plus one optimizer step, returns the
  // loss (mean per-element squared error between noise and prediction).
  T step_with(const std::vector<const BatchItem*>& batch,
              const std::vector<std::size_t>& ns,
              const std::vector<nn::Tensor<T>>& noises,
              const std::vector<bool>& dropped) {
    nn::Graph<T> g;
    g.set_check_finite(true);  // a NaN loss aborts the step with a diagnostic
    nn::ParamBinding<T> bind(g);
    typename nn::Graph<T>::Val total{};
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const BatchItem& item = *batch[i];
      nn::Tensor<T> x_n = item.x0;
      const double a = std::sqrt(schedule_.alpha_bar_at(ns[i]));
      const double b = std::sqrt(1.0 - schedule_.alpha_bar_at(ns[i]));
      for (std::size_t k = 0; k < x_n.data.size(); ++k)
        x_n.data[k] = static_cast<T>(a * item.x0.data[k] + b * noises[i].data[k]);

      auto cond = dropped[i] ? model_.null_rows(g, bind, item.cond.rows)
                             : g.leaf(item.cond);
      auto eps_hat = model_.forward(g, bind, g.leaf(x_n), ns[i], cond);
      auto loss_i = g.mse(eps_hat, g.leaf(noises[i]));
      total = (i == 0) ? loss_i : g.add(total, loss_i);
    }
    auto loss = g.scale(total, static_cast<T>(1.0 / double(batch.size())));
    g.backward(loss);

    std::map<std::string, nn::Tensor<T>> grads;
    for (auto& [name, tensor] : params_) grads[name] = g.grad(bind(*tensor));
    nn::AdamConfig<T> acfg;
    acfg.lr = static_cast<T>(cfg_.lr);
    nn::adam_step(params_, grads, opt_, acfg);
    ++step_;
    return g.value(loss).data[0];
  }

  // One step with randomness derived from (seed, step): batch windows,
  // uniform step indices, gaussian noise, conditioning dropout.
  T step() {
    Rng rng = derive_rng(seed_, kRngStream, step_);
    std::vector<const BatchItem*> batch;
    std::vector<std::size_t> ns;
    std::vector<nn::Tensor<T>> noises;
    std::vector<bool> dropped;
    for (std::size_t i = 0; i < cfg_.batch; ++i) {
      batch.push_back(&items_[rng.uniform_int(items_.size())]);
      ns.push_back(1 + rng.uniform_int(schedule_.steps()));
      nn::Tensor<T> noise(batch.back()->x0.rows, batch.back()->x0.cols);
      for (auto& x : noise.data) x = static_cast<T>(rng.normal());
      noises.push_back(std::move(noise));
      dropped.push_back(rng.uniform() < guidance_.p_drop);
    }
    return step_with(batch, ns, noises, dropped);
  }

  // step<TAB>loss per line.
  void train(std::size_t steps, std::ostream* log) {
    for (std::size_t i = 0; i < steps; ++i) {
      const T loss = step();
      if (log) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%llu\t%.9g\n",
                      static_cast<unsigned long long>(step_), double(loss));
        (*log) << buf;
      }
    }
  }

 private:
  Model& model_;
  nn::NamedParams<T> params_;
  NoiseSchedule schedule_;
  GuidanceParams guidance_;
  DiffusionTrainConfig cfg_;
  std::uint64_t seed_;
  std::uint64_t step_ = 0;
  std::vector<BatchItem> items_;
  nn::AdamState<T> opt_;
};

// Checkpoint packing mirrors the csmp module: model hyperparameters plus the
// schedule description in the header, parameters and optimizer moments as
// records. `extra` carries dataset statistics (feature mean/std).
template <typename T>
nn::ModelCheckpoint denoiser_to_checkpoint(
    const Denoiser<T>& model, const nn::NamedParams<T>& params,
    const nn::AdamState<T>& opt, const NoiseSchedule& schedule,
    const std::string& schedule_kind, std::uint64_t step, std::uint64_t seed,
    const std::map<std::string, nn::Tensor<float>>& extra = {}) {
  nn::ModelCheckpoint ckpt = denoiser_checkpoint_header(model.cfg);
  ckpt.step = step;
  ckpt.seed = seed;
  ckpt.hyper["sched.steps"] = double(schedule.steps());
  ckpt.hyper["sched.beta_first"] = schedule.beta.front();
  ckpt.hyper["sched.beta_last"] = schedule.beta.back();
  ckpt.hyper["sched.kind"] = schedule_kind == "linear" ? 0.0 : -1.0;
  ckpt.hyper["opt.t"] = double(opt.t);
  for (const auto& [name, tensor] : params)
    ckpt.params[name] = tensor->template cast<float>();
  for (const auto& [name, m] : opt.m) ckpt.params["opt.m/" + name] = m.template cast<float>();
  for (const auto& [name, v] : opt.v) ckpt.params["opt.v/" + name] = v.template cast<float>();
  for (const auto& [name, t] : extra) ckpt.params[name] = t;
  return ckpt;
}

inline NoiseSchedule schedule_from_checkpoint(const nn::ModelCheckpoint& ckpt) {
  if (ckpt.hyper_or("sched.kind", 0.0) != 0.0)
    throw std::runtime_error("checkpoint has an unknown schedule kind");
  return make_schedule("linear",
                       static_cast<std::size_t>(ckpt.hyper_required("sched.steps")),
                       ckpt.hyper_required("sched.beta_first"),
                       ckpt.hyper_required("sched.beta_last"));
}

template <typename T>
Denoiser<T> denoiser_from_checkpoint(const nn::ModelCheckpoint& ckpt,
                                     nn::AdamState<T>* opt = nullptr) {
  Rng rng(0);  // initializer values are overwritten below
  Denoiser<T> model(denoiser_config_from_checkpoint(ckpt), rng);
  nn::NamedParams<T> params;
  model.collect_params(params);
  csmp::load_params_from_checkpoint(ckpt, params, opt);
  return model;
}

}  // namespace gesturegen::diffusion
