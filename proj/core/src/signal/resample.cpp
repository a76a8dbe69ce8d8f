#include "gesturegen/signal/resample.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::sig {

namespace {

double kaiser(double n, double total, double beta) {
  // I0-based window over [0, total-1].
  const double r = 2.0 * n / (total - 1.0) - 1.0;
  const double arg = beta * std::sqrt(std::max(0.0, 1.0 - r * r));
  return std::cyl_bessel_i(0.0, arg) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace

std::vector<double> resample_polyphase(const std::vector<double>& x, unsigned up,
                                       unsigned down, double kaiser_beta,
                                       unsigned taps_per_phase) {
  if (x.empty()) throw std::invalid_argument("resample: empty input");
  if (up == 0 || down == 0)
    throw std::invalid_argument("resample: up/down must be positive");
  if (up == down) return x;
  if (taps_per_phase == 0) taps_per_phase = 10 * std::max(up, down);

  // Symmetric windowed sinc on the upsampled grid; +1 tap to center it.
  const std::size_t total = static_cast<std::size_t>(taps_per_phase) * up + 1;
  const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(total / 2);
  const double cutoff = M_PI / static_cast<double>(std::max(up, down));

  std::vector<double> h(total);
  for (std::size_t i = 0; i < total; ++i) {
    const auto m = static_cast<double>(static_cast<std::ptrdiff_t>(i) - center);
    const double ideal = m == 0.0 ? cutoff / M_PI : std::sin(cutoff * m) / (M_PI * m);
    h[i] = ideal * kaiser(static_cast<double>(i), static_cast<double>(total),
                          kaiser_beta);
  }
  // Unit-sum per phase: constants pass through exactly (steady state).
  std::vector<double> phase_sum(up, 0.0);
  for (std::size_t i = 0; i < total; ++i) phase_sum[i % up] += h[i];
  for (std::size_t i = 0; i < total; ++i) h[i] /= phase_sum[i % up];

  const std::size_t n = x.size();
  const std::size_t out_len = (n * up + down - 1) / down;
  std::vector<double> y(out_len, 0.0);
  for (std::size_t k = 0; k < out_len; ++k) {
    // Output sample k sits at upsampled index k*down; the filter is applied
    // centered there (group-delay compensated).
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(k * down) + center;
    // Need tap index pos - m*up in [0, total) with m in [0, n).
    const std::ptrdiff_t upi = static_cast<std::ptrdiff_t>(up);
    std::ptrdiff_t m_lo = (pos - static_cast<std::ptrdiff_t>(total - 1) + upi - 1) / upi;
    std::ptrdiff_t m_hi = pos / upi;
    m_lo = std::max<std::ptrdiff_t>(m_lo, 0);
    m_hi = std::min<std::ptrdiff_t>(m_hi, static_cast<std::ptrdiff_t>(n) - 1);
    double acc = 0.0;
    for (std::ptrdiff_t m = m_lo; m <= m_hi; ++m)
      acc += x[static_cast<std::size_t>(m)] * h[static_cast<std::size_t>(pos - m * upi)];
    y[k] = acc;
  }
  return y;
}

std::vector<double> resample_rate(const std::vector<double>& x, unsigned rate_in,
                                  unsigned rate_out) {
  if (rate_in == 0 || rate_out == 0)
    throw std::invalid_argument("resample: rates must be positive");
  const unsigned g = std::gcd(rate_in, rate_out);
  return resample_polyphase(x, rate_out / g, rate_in / g);
}

MatrixRM resample_columns(const MatrixRM& x, unsigned rate_in,
                          unsigned rate_out) {
  if (x.rows() == 0) throw std::invalid_argument("resample: empty input");
  std::vector<double> col(static_cast<std::size_t>(x.rows()));
  MatrixRM out;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      col[static_cast<std::size_t>(r)] = x(r, c);
    const std::vector<double> res = resample_rate(col, rate_in, rate_out);
    if (out.size() == 0)
      out = MatrixRM::Zero(static_cast<Eigen::Index>(res.size()), x.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      out(r, c) = res[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace gesturegen::sig
