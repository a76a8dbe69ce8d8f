#include "gesturegen/embed/features.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gesturegen/common/rng.hpp"
#include "gesturegen/common/strings.hpp"

namespace gesturegen::embed {

namespace {

constexpr std::size_t kWindow = 400;  // 25 ms at 16 kHz
constexpr std::size_t kHop = 320;     // 20 ms -> 50 Hz
constexpr std::size_t kFft = 512;
constexpr std::size_t kMels = 40;
constexpr double kSampleRate = 16000.0;

// In-place iterative radix-2 FFT.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters spaced evenly on the mel scale over [0, 8000] Hz.
std::vector<std::vector<double>> mel_filterbank() {
  const std::size_t bins = kFft / 2 + 1;
  const double mel_max = hz_to_mel(kSampleRate / 2);
  std::vector<double> centers(kMels + 2);
  for (std::size_t i = 0; i < centers.size(); ++i)
    centers[i] = mel_to_hz(mel_max * static_cast<double>(i) / (kMels + 1));
  std::vector<std::vector<double>> fb(kMels, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < kMels; ++m) {
    const double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
    for (std::size_t b = 0; b < bins; ++b) {
      const double hz = kSampleRate * static_cast<double>(b) / kFft;
      if (hz > lo && hz < mid) fb[m][b] = (hz - lo) / (mid - lo);
      else if (hz >= mid && hz < hi) fb[m][b] = (hi - hz) / (hi - mid);
    }
  }
  return fb;
}

MatrixRM random_projection(std::size_t in, std::size_t out, std::uint64_t seed) {
  Rng rng(mix64(seed));
  MatrixRM w = MatrixRM::Zero(static_cast<Eigen::Index>(in),
                              static_cast<Eigen::Index>(out));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * rng.normal();
  return w;
}

}  // namespace

EmbeddingSequence fallback_audio_features(const sig::AudioTrack& audio,
                                          std::uint64_t seed) {
  if (audio.samples.empty())
    throw std::invalid_argument("fallback featurizer: empty audio");
  if (std::lround(audio.sample_rate) != 16000)
    throw std::invalid_argument(cat("fallback featurizer expects 16 kHz audio, got ",
                                    audio.sample_rate, " Hz"));

  const std::size_t n = audio.samples.size();
  const std::size_t n_frames = (n + kHop - 1) / kHop;
  static const auto filterbank = mel_filterbank();

  MatrixRM mels = MatrixRM::Zero(static_cast<Eigen::Index>(n_frames), kMels);
  std::vector<std::complex<double>> buf(kFft);
  for (std::size_t f = 0; f < n_frames; ++f) {
    // Hann-windowed frame, zero-padded past the end of the signal.
    for (std::size_t i = 0; i < kFft; ++i) {
      const std::size_t s = f * kHop + i;
      double v = (i < kWindow && s < n) ? audio.samples[s] : 0.0;
      if (i < kWindow)
        v *= 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / (kWindow - 1));
      buf[i] = v;
    }
    fft(buf);
    for (std::size_t m = 0; m < kMels; ++m) {
      double acc = 0.0;
      for (std::size_t b = 0; b <= kFft / 2; ++b)
        acc += filterbank[m][b] * std::norm(buf[b]);
      mels(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m)) =
          std::log(acc + 1e-10);
    }
  }

  EmbeddingSequence seq;
  seq.rate = 50.0;
  seq.modality = Modality::Audio;
  // Plain per-row dot products: identical frames must project to bitwise
  // identical rows, which blocked GEMM kernels do not guarantee.
  const MatrixRM proj = random_projection(kMels, kEmbeddingDim, seed);
  seq.vectors = MatrixRM::Zero(static_cast<Eigen::Index>(n_frames), kEmbeddingDim);
  for (Eigen::Index f = 0; f < seq.vectors.rows(); ++f)
    for (Eigen::Index d = 0; d < seq.vectors.cols(); ++d) {
      double acc = 0.0;
      for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(kMels); ++m)
        acc += mels(f, m) * proj(m, d);
      seq.vectors(f, d) = acc;
    }
  return seq;
}

MatrixRM fallback_token_vectors(const TimedTranscript& transcript,
                                std::uint64_t seed) {
  MatrixRM out = MatrixRM::Zero(
      static_cast<Eigen::Index>(transcript.tokens.size()), kEmbeddingDim);
  for (std::size_t t = 0; t < transcript.tokens.size(); ++t) {
    // Seed from the token bytes so identical words embed identically.
    std::uint64_t h = 1469598103934665603ull ^ mix64(seed);
    for (unsigned char c : transcript.tokens[t].text) {
      h ^= c;
      h *= 1099511628211ull;
    }
    Rng rng(mix64(h));
    const double scale = 1.0 / std::sqrt(static_cast<double>(kEmbeddingDim));
    for (std::size_t d = 0; d < kEmbeddingDim; ++d)
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d)) =
          scale * rng.normal();
  }
  return out;
}

}  // namespace gesturegen::embed
