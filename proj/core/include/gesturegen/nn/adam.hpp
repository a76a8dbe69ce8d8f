#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gesturegen/common/strings.hpp"
#include "gesturegen/nn/tensor.hpp"

namespace gesturegen::nn {

template <typename T>
struct AdamConfig {
  T lr = T(1e-3);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Moments are keyed by parameter name so they serialize into checkpoints and
// survive a resume exactly.
template <typename T>
struct AdamState {
  std::uint64_t t = 0;
  std::map<std::string, Tensor<T>> m;
  std::map<std::string, Tensor<T>> v;
};

template <typename T>
using NamedParams = std::vector<std::pair<std::string, Tensor<T>*>>;

// One adaptive-moment update with bias correction. Parameters without an
// entry in `grads` are treated as zero-gradient (their moments still decay).
template <typename T>
void adam_step(const NamedParams<T>& params,
               const std::map<std::string, Tensor<T>>& grads,
               AdamState<T>& state, const AdamConfig<T>& cfg) {
  for (const auto& [name, grad] : grads) {
    if (!grad.all_finite())
      throw std::runtime_error(
          cat("adam: non-finite gradient for parameter '", name,
              "'; step rejected"));
  }
  state.t += 1;
  const T bc1 = T(1) - static_cast<T>(std::pow(double(cfg.beta1), double(state.t)));
  const T bc2 = T(1) - static_cast<T>(std::pow(double(cfg.beta2), double(state.t)));
  for (const auto& [name, p] : params) {
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.size() != p->size()) m = Tensor<T>(p->rows, p->cols, T(0));
    if (v.size() != p->size()) v = Tensor<T>(p->rows, p->cols, T(0));
    const auto it = grads.find(name);
    for (std::size_t i = 0; i < p->data.size(); ++i) {
      const T g = (it != grads.end()) ? it->second.data[i] : T(0);
      m.data[i] = cfg.beta1 * m.data[i] + (T(1) - cfg.beta1) * g;
      v.data[i] = cfg.beta2 * v.data[i] + (T(1) - cfg.beta2) * g * g;
      const T mhat = m.data[i] / bc1;
      const T vhat = v.data[i] / bc2;
      p->data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace gesturegen::nn
