#include "gesturegen/signal/gate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::sig {

void SpeechIntervals::normalize() {
  for (const Interval& iv : spans)
    if (!(iv.start < iv.end))
      throw std::invalid_argument(
          cat("interval start ", iv.start, " must be before end ", iv.end));
  std::sort(spans.begin(), spans.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> merged;
  for (const Interval& iv : spans) {
    if (!merged.empty() && iv.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  spans = std::move(merged);
}

AudioTrack remove_dc(const AudioTrack& audio, double zero_eps) {
  double sum = 0;
  std::size_t count = 0;
  for (double s : audio.samples) {
    if (std::abs(s) > zero_eps) {
      sum += s;
      ++count;
    }
  }
  if (count == 0) return audio;
  const double mean = sum / static_cast<double>(count);
  AudioTrack out = audio;
  for (double& s : out.samples)
    if (std::abs(s) > zero_eps) s -= mean;
  return out;
}

double crosstalk_gain(const SpeechIntervals& speech, double t, double ramp) {
  double gain = 0.0;
  for (const Interval& iv : speech.spans) {
    double g;
    if (t >= iv.start && t <= iv.end) {
      g = 1.0;
    } else if (ramp > 0 && t > iv.end && t < iv.end + ramp) {
      g = (iv.end + ramp - t) / ramp;
    } else if (ramp > 0 && t < iv.start && t > iv.start - ramp) {
      g = (t - (iv.start - ramp)) / ramp;
    } else {
      g = 0.0;
    }
    gain = std::max(gain, g);
  }
  return gain;
}

AudioTrack mute_crosstalk(const AudioTrack& audio, const SpeechIntervals& speech,
                          double ramp, RampShape shape) {
  if (ramp < 0) throw std::invalid_argument(cat("negative ramp ", ramp));
  (void)shape;  // only Linear exists

  SpeechIntervals clipped;
  const double duration = audio.duration();
  for (const Interval& iv : speech.spans) {
    Interval c{std::max(iv.start, 0.0), std::min(iv.end, duration)};
    if (c.start < c.end) clipped.spans.push_back(c);
  }
  clipped.normalize();

  AudioTrack out = audio;
  if (clipped.spans.empty()) {
    for (double& s : out.samples) s = 0.0;
    return out;
  }
  // Sweep: spans are sorted and disjoint, so only the current/next span can
  // contribute gain at time t (ramps of distinct merged spans may overlap;
  // crosstalk_gain handles the max, the sweep just bounds which spans matter).
  std::size_t first = 0;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double t = static_cast<double>(i) / audio.sample_rate;
    while (first + 1 < clipped.spans.size() &&
           t > clipped.spans[first].end + ramp)
      ++first;
    double gain = 0.0;
    for (std::size_t k = first;
         k < clipped.spans.size() && clipped.spans[k].start - ramp <= t; ++k) {
      SpeechIntervals one;
      one.spans = {clipped.spans[k]};
      gain = std::max(gain, crosstalk_gain(one, t, ramp));
    }
    out.samples[i] *= gain;
  }
  return out;
}

}  // namespace gesturegen::sig
