#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gesturegen/common/matrix.hpp"

namespace gesturegen::diffusion {

// Forward-process variances beta_1..beta_N with the derived per-step
// retention alpha_n = 1 - beta_n and cumulative retention
// alpha_bar_n = prod_{m<=n} alpha_m (strictly decreasing).
struct NoiseSchedule {
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  std::size_t steps() const { return beta.size(); }

  // 1-based accessors matching the step indexing n in [1, N].
  double beta_at(std::size_t n) const { return beta[n - 1]; }
  double alpha_at(std::size_t n) const { return alpha[n - 1]; }
  double alpha_bar_at(std::size_t n) const { return alpha_bar[n - 1]; }

  // Reverse-step variance: (1 - alpha_bar_{n-1}) / (1 - alpha_bar_n) * beta_n,
  // zero at n = 1 (alpha_bar_0 = 1).
  double posterior_variance(std::size_t n) const;

  void validate() const;
};

// kind: "linear" (beta interpolated linearly from beta_1 to beta_n).
NoiseSchedule make_schedule(const std::string& kind, std::size_t n,
                            double beta_first, double beta_last);

// Closed-form forward marginal:
// x_n = sqrt(alpha_bar_n) * x0 + sqrt(1 - alpha_bar_n) * noise.
MatrixRM forward_sample(const MatrixRM& x0, std::size_t n,
                        const NoiseSchedule& schedule, const MatrixRM& noise);

}  // namespace gesturegen::diffusion
