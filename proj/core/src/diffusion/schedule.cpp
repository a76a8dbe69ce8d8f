#include "gesturegen/diffusion/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::diffusion {

void NoiseSchedule::validate() const {
  if (beta.empty()) throw std::invalid_argument("schedule has no steps");
  double prev_bar = 1.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(beta[i] > 0.0 && beta[i] < 1.0))
      throw std::invalid_argument(cat("beta[", i + 1, "] = ", beta[i],
                                      " out of (0, 1)"));
    if (!(alpha_bar[i] < prev_bar))
      throw std::invalid_argument("alpha_bar must be strictly decreasing");
    prev_bar = alpha_bar[i];
  }
}

double NoiseSchedule::posterior_variance(std::size_t n) const {
  const double bar_prev = n >= 2 ? alpha_bar[n - 2] : 1.0;
  return (1.0 - bar_prev) / (1.0 - alpha_bar[n - 1]) * beta[n - 1];
}

NoiseSchedule make_schedule(const std::string& kind, std::size_t n,
                            double beta_first, double beta_last) {
  if (kind != "linear")
    throw std::invalid_argument(cat("unknown schedule kind '", kind, "'"));
  if (n < 1) throw std::invalid_argument("schedule needs at least one step");
  if (!(beta_first > 0.0) || !(beta_first <= beta_last) || !(beta_last < 1.0))
    throw std::invalid_argument(
        cat("need 0 < beta_first <= beta_last < 1, got ", beta_first, ", ",
            beta_last));

  NoiseSchedule s;
  s.beta.resize(n);
  s.alpha.resize(n);
  s.alpha_bar.resize(n);
  double bar = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    s.beta[i] = beta_first + (beta_last - beta_first) * t;
    s.alpha[i] = 1.0 - s.beta[i];
    bar *= s.alpha[i];
    s.alpha_bar[i] = bar;
  }
  s.validate();
  return s;
}

MatrixRM forward_sample(const MatrixRM& x0, std::size_t n,
                        const NoiseSchedule& schedule, const MatrixRM& noise) {
  if (n < 1 || n > schedule.steps())
    throw std::invalid_argument(cat("diffusion step ", n, " out of [1, ",
                                    schedule.steps(), "]"));
  if (x0.rows() != noise.rows() || x0.cols() != noise.cols())
    throw std::invalid_argument("forward_sample: noise shape mismatch");
  const double a = std::sqrt(schedule.alpha_bar_at(n));
  const double b = std::sqrt(1.0 - schedule.alpha_bar_at(n));
  return a * x0 + b * noise;
}

}  // namespace gesturegen::diffusion
