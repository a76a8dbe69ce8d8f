#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gesturegen/common/matrix.hpp"
#include "gesturegen/common/rng.hpp"
#include "gesturegen/diffusion/denoiser.hpp"
#include "gesturegen/diffusion/schedule.hpp"

namespace gesturegen::diffusion {

// Classifier-free combination:
// eps_bar = eps_cond + gamma * (eps_cond - eps_uncond).
template <typename T>
nn::Tensor<T> guided_combine(const nn::Tensor<T>& eps_cond,
                             const nn::Tensor<T>& eps_uncond, T gamma) {
  if (!eps_cond.same_shape(eps_uncond))
    throw std::invalid_argument("guided_combine: shape mismatch");
  nn::Tensor<T> out = eps_cond;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] += gamma * (eps_cond.data[i] - eps_uncond.data[i]);
  return out;
}

// Guided noise prediction. gamma = 0 short-circuits to the conditioned pass;
// the unconditioned branch runs the model on its learned null token.
template <typename T, typename Model>
nn::Tensor<T> guided_epsilon(Model& model, const nn::Tensor<T>& x_n,
                             std::size_t n, const nn::Tensor<T>& cond,
                             T gamma) {
  nn::Graph<T> g;
  nn::ParamBinding<T> bind(g);
  const auto eps_c =
      g.value(model.forward(g, bind, g.leaf(x_n), n, g.leaf(cond)));
  if (gamma == T(0)) return eps_c;
  const auto eps_u = g.value(
      model.forward(g, bind, g.leaf(x_n), n, model.null_rows(g, bind, x_n.rows)));
  return guided_combine(eps_c, eps_u, gamma);
}

struct SamplerConfig {
  std::size_t window = 100;      // longest stretch synthesized in one pass
  std::size_t xfade_frames = 30; // cross-fade overlap between windows
};

constexpr std::uint64_t kSampleRngStream = 0x5A11;

namespace detail {

// Ancestral DDPM loop over one window. Noise for step n of window w comes
// from derive_rng(seed, stream + w, n), so the result is a pure function of
// (inputs, seed) regardless of evaluation order.
template <typename T, typename Model>
nn::Tensor<T> sample_window(Model& model, const NoiseSchedule& schedule,
                            const nn::Tensor<T>& cond, T gamma,
                            std::uint64_t seed, std::size_t window_index) {
  const std::size_t frames = cond.rows;
  const std::size_t dim = model.cfg.pose_dim;
  nn::Tensor<T> x(frames, dim);
  {
    Rng rng = derive_rng(seed, kSampleRngStream + window_index, 0);
    for (auto& v : x.data) v = static_cast<T>(rng.normal());
  }
  for (std::size_t n = schedule.steps(); n >= 1; --n) {
    const nn::Tensor<T> eps = guided_epsilon(model, x, n, cond, gamma);
    const double alpha = schedule.alpha_at(n);
    const double bar = schedule.alpha_bar_at(n);
    const double k = schedule.beta_at(n) / std::sqrt(1.0 - bar);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    for (std::size_t i = 0; i < x.data.size(); ++i)
      x.data[i] = static_cast<T>(inv_sqrt_alpha *
                                 (double(x.data[i]) - k * double(eps.data[i])));
    if (n > 1) {
      const double sigma = std::sqrt(schedule.posterior_variance(n));
      Rng rng = derive_rng(seed, kSampleRngStream + window_index, n);
      for (auto& v : x.data)
        v = static_cast<T>(double(v) + sigma * rng.normal());
    }
  }
  return x;
}

}  // namespace detail

// Ancestral sampling for a conditioning stream of any length. Streams longer
// than the window are synthesized in overlapping windows blended with a
// linear cross-fade. Output is (T x pose_dim) in the model's standardized
// feature space.
template <typename T, typename Model>
MatrixRM sample(Model& model, const NoiseSchedule& schedule,
                const MatrixRM& cond, double gamma, std::uint64_t seed,
                const SamplerConfig& cfg) {
  schedule.validate();
  if (cond.rows() < 1) throw std::invalid_argument("sample: empty conditioning");
  if (static_cast<std::size_t>(cond.cols()) != model.cfg.cond_dim)
    throw std::invalid_argument(
        cat("sample: conditioning dim ", cond.cols(), ", model expects ",
            model.cfg.cond_dim));
  const auto total = static_cast<std::size_t>(cond.rows());
  const std::size_t window = std::min(cfg.window, total);
  if (cfg.xfade_frames >= window && total > window)
    throw std::invalid_argument("sample: cross-fade must be shorter than window");

  // Window starts: fixed stride with an end-anchored final window.
  std::vector<std::size_t> starts{0};
  const std::size_t stride = window - (total > window ? cfg.xfade_frames : 0);
  while (starts.back() + window < total) {
    const std::size_t next = starts.back() + stride;
    starts.push_back(std::min(next, total - window));
  }

  MatrixRM out = MatrixRM::Zero(static_cast<Eigen::Index>(total),
                                static_cast<Eigen::Index>(model.cfg.pose_dim));
  std::vector<double> weight_sum(total, 0.0);
  for (std::size_t wi = 0; wi < starts.size(); ++wi) {
    const std::size_t start = starts[wi];
    nn::Tensor<T> cwin(window, static_cast<std::size_t>(cond.cols()));
    for (std::size_t r = 0; r < window; ++r)
      for (std::size_t c = 0; c < cwin.cols; ++c)
        cwin.at(r, c) = static_cast<T>(cond(static_cast<Eigen::Index>(start + r),
                                            static_cast<Eigen::Index>(c)));
    const nn::Tensor<T> xwin = detail::sample_window(
        model, schedule, cwin, static_cast<T>(gamma), seed, wi);

    const bool first = wi == 0;
    const bool last = wi + 1 == starts.size();
    for (std::size_t r = 0; r < window; ++r) {
      double w = 1.0;
      if (!first && r < cfg.xfade_frames)
        w = static_cast<double>(r + 1) / static_cast<double>(cfg.xfade_frames + 1);
      if (!last && r >= window - cfg.xfade_frames)
        w = std::min(w, static_cast<double>(window - r) /
                            static_cast<double>(cfg.xfade_frames + 1));
      const auto row = static_cast<Eigen::Index>(start + r);
      for (std::size_t c = 0; c < xwin.cols; ++c)
        out(row, static_cast<Eigen::Index>(c)) += w * double(xwin.at(r, c));
      weight_sum[start + r] += w;
    }
  }
  for (std::size_t r = 0; r < total; ++r)
    out.row(static_cast<Eigen::Index>(r)) /= weight_sum[r];
  return out;
}

}  // namespace gesturegen::diffusion
