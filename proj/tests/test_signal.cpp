#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gesturegen/common/rng.hpp"
#include "gesturegen/signal/audio.hpp"
#include "gesturegen/signal/gate.hpp"
#include "gesturegen/signal/resample.hpp"

using namespace gesturegen;
using namespace gesturegen::sig;

TEST_CASE("dc removal") {
  SUBCASE("mean over non-zeroed samples only") {
    AudioTrack t;
    t.samples = {1, 3, 0, 0, 2, 4};
    AudioTrack out = remove_dc(t, 0.0);
    const std::vector<double> want = {-1.5, 0.5, 0, 0, -0.5, 1.5};
    REQUIRE(out.samples.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
  SUBCASE("all-zero track is unchanged") {
    AudioTrack t;
    t.samples.assign(100, 0.0);
    AudioTrack out = remove_dc(t);
    CHECK(out.samples == t.samples);
  }
  SUBCASE("non-zeroed mean is zero afterwards, and the op is idempotent") {
    Rng rng(3);
    AudioTrack t;
    for (int i = 0; i < 4000; ++i) {
      const bool zeroed = (i / 400) % 3 == 1;  // anonymized stretches
      t.samples.push_back(zeroed ? 0.0 : 0.3 * rng.normal() + 0.17);
    }
    AudioTrack once = remove_dc(t, 0.0);
    double sum = 0;
    std::size_t n = 0;
    for (double s : once.samples)
      if (s != 0.0) {
        sum += s;
        ++n;
      }
    CHECK(std::abs(sum / n) < 1e-12);
    AudioTrack twice = remove_dc(once, 0.0);
    for (std::size_t i = 0; i < t.samples.size(); ++i)
      CHECK(std::abs(twice.samples[i] - once.samples[i]) < 1e-12);
  }
}

TEST_CASE("crosstalk muting") {
  AudioTrack ones;
  ones.sample_rate = 16000;
  ones.samples.assign(16000 * 3, 1.0);

  SUBCASE("one interval covering the whole track is the identity") {
    SpeechIntervals sp;
    sp.spans = {{0.0, 3.0}};
    AudioTrack out = mute_crosstalk(ones, sp);
    for (double s : out.samples) CHECK(s == 1.0);
  }
  SUBCASE("empty interval list mutes everything") {
    SpeechIntervals sp;
    AudioTrack out = mute_crosstalk(ones, sp);
    for (double s : out.samples) CHECK(s == 0.0);
  }
  SUBCASE("linear ramp values match the piecewise envelope") {
    SpeechIntervals sp;
    sp.spans = {{1.0, 2.0}};
    AudioTrack out = mute_crosstalk(ones, sp, 0.2);
    auto at = [&](double t) {
      return out.samples[static_cast<std::size_t>(std::lround(t * 16000))];
    };
    CHECK(at(0.5) == 0.0);
    CHECK(at(0.9) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(at(1.5) == 1.0);
    CHECK(at(2.1) == doctest::Approx(0.5).epsilon(1e-3));  // falling ramp
    CHECK(at(2.5) == 0.0);
    // Independent oracle: evaluate the envelope definition sample by sample.
    for (std::size_t i = 0; i < out.samples.size(); i += 7) {
      const double t = static_cast<double>(i) / 16000;
      double g;
      if (t >= 1.0 && t <= 2.0)
        g = 1.0;
      else if (t > 0.8 && t < 1.0)
        g = (t - 0.8) / 0.2;
      else if (t > 2.0 && t < 2.2)
        g = (2.2 - t) / 0.2;
      else
        g = 0.0;
      CHECK(out.samples[i] == doctest::Approx(g).epsilon(1e-9));
    }
  }
  SUBCASE("gain is within [0,1] and continuous") {
    SpeechIntervals sp;
    sp.spans = {{0.4, 0.9}, {1.05, 1.3}, {1.35, 2.2}};
    const double ramp = 0.2;
    AudioTrack out = mute_crosstalk(ones, sp, ramp);
    const double max_jump = (1.0 / ramp) / ones.sample_rate + 1e-9;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      CHECK(out.samples[i] >= 0.0);
      CHECK(out.samples[i] <= 1.0);
      if (i > 0)
        CHECK(std::abs(out.samples[i] - out.samples[i - 1]) <= max_jump);
    }
  }
  SUBCASE("intervals beyond the track are clipped") {
    SpeechIntervals sp;
    sp.spans = {{2.5, 99.0}};
    AudioTrack out = mute_crosstalk(ones, sp, 0.2);
    CHECK(out.samples.back() == 1.0);
    CHECK(out.samples[0] == 0.0);
  }
  SUBCASE("negative ramp is rejected") {
    SpeechIntervals sp;
    sp.spans = {{0.0, 1.0}};
    CHECK_THROWS_AS(mute_crosstalk(ones, sp, -0.1), std::invalid_argument);
  }
}

TEST_CASE("polyphase resampling") {
  SUBCASE("constant input at 50 Hz to 30 Hz") {
    std::vector<double> x(100, 1.0);
    auto y = resample_rate(x, 50, 30);
    CHECK(y.size() == 60);  // ceil(100*3/5)
    // Steady state (full filter overlap) is exactly 1.
    for (std::size_t k = 15; k < 45; ++k)
      CHECK(y[k] == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("5 Hz sine sampled at 50 Hz matches the analytic 30 Hz sine") {
    std::vector<double> x(100);
    for (std::size_t m = 0; m < x.size(); ++m)
      x[m] = std::sin(2 * M_PI * 5.0 * static_cast<double>(m) / 50.0);
    auto y = resample_rate(x, 50, 30);
    REQUIRE(y.size() == 60);
    double max_err = 0;
    for (std::size_t k = 15; k < 45; ++k) {
      const double want = std::sin(2 * M_PI * 5.0 * static_cast<double>(k) / 30.0);
      max_err = std::max(max_err, std::abs(y[k] - want));
    }
    CHECK(max_err < 1e-2);
  }
  SUBCASE("equal rates return the input") {
    Rng rng(5);
    std::vector<double> x(64);
    for (auto& v : x) v = rng.normal();
    auto y = resample_rate(x, 16000, 16000);
    REQUIRE(y.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(std::abs(y[i] - x[i]) < 1e-9);
  }
  SUBCASE("resampling is linear") {
    Rng rng(7);
    std::vector<double> x(80), z(80);
    for (auto& v : x) v = rng.normal();
    for (auto& v : z) v = rng.normal();
    const double a = 1.7, b = -0.4;
    std::vector<double> mix(80);
    for (std::size_t i = 0; i < 80; ++i) mix[i] = a * x[i] + b * z[i];
    auto ya = resample_rate(x, 50, 30);
    auto yb = resample_rate(z, 50, 30);
    auto ym = resample_rate(mix, 50, 30);
    for (std::size_t i = 0; i < ym.size(); ++i)
      CHECK(std::abs(ym[i] - (a * ya[i] + b * yb[i])) < 1e-9);
  }
  SUBCASE("column-wise application keeps channels independent") {
    Rng rng(9);
    MatrixRM x = MatrixRM::Zero(50, 3);
    for (Eigen::Index r = 0; r < 50; ++r)
      for (Eigen::Index c = 0; c < 3; ++c) x(r, c) = rng.normal();
    MatrixRM y = resample_columns(x, 50, 30);
    // Zeroing column 2 must not change columns 0 and 1.
    MatrixRM x2 = x;
    x2.col(2).setZero();
    MatrixRM y2 = resample_columns(x2, 50, 30);
    CHECK((y.col(0) - y2.col(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((y.col(1) - y2.col(1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(y.rows() == 30);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(resample_rate({}, 50, 30), std::invalid_argument);
  }
}

TEST_CASE("wav io round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gesturegen_wav_test";
  fs::create_directories(dir);

  Rng rng(11);
  AudioTrack t;
  t.sample_rate = 16000;
  for (int i = 0; i < 1600; ++i) t.samples.push_back(0.5 * rng.normal());

  SUBCASE("float32") {
    const std::string path = (dir / "f32.wav").string();
    write_wav(path, t, WavFormat::Float32);
    AudioTrack back = read_wav(path);
    CHECK(back.sample_rate == 16000);
    REQUIRE(back.samples.size() == t.samples.size());
    for (std::size_t i = 0; i < t.samples.size(); ++i)
      CHECK(back.samples[i] ==
            doctest::Approx(t.samples[i]).epsilon(1e-7));
  }
  SUBCASE("pcm16") {
    const std::string path = (dir / "p16.wav").string();
    write_wav(path, t, WavFormat::Pcm16);
    AudioTrack back = read_wav(path);
    for (std::size_t i = 0; i < t.samples.size(); ++i)
      CHECK(std::abs(back.samples[i] - std::clamp(t.samples[i], -1.0, 1.0)) <
            1.0 / 16000);
  }
  SUBCASE("garbage file is rejected") {
    const std::string path = (dir / "bad.wav").string();
    std::ofstream(path) << "not a wav";
    CHECK_THROWS(read_wav(path));
  }
}
