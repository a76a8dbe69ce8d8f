#pragma once

#include <vector>

#include "gesturegen/signal/audio.hpp"

namespace gesturegen::sig {

struct Interval {
  double start = 0;  // seconds
  double end = 0;
};

// Marked-as-speech spans for one speaker. normalize() sorts and merges
// overlapping or touching spans.
struct SpeechIntervals {
  std::vector<Interval> spans;
  void normalize();
};

// Subtracts the mean of the samples with |x| > zero_eps from exactly those
// samples. Zeroed-out stretches (anonymized regions) stay untouched; a track
// with nothing above the threshold is returned as-is.
AudioTrack remove_dc(const AudioTrack& audio, double zero_eps = 0.0);

enum class RampShape { Linear };

// Zeroes everything outside the speech spans. Gain ramps linearly from 0 to 1
// over `ramp` seconds before each span and back down after it; overlapping
// ramps take the pointwise maximum. Spans are clipped to the track.
AudioTrack mute_crosstalk(const AudioTrack& audio, const SpeechIntervals& speech,
                          double ramp = 0.2,
                          RampShape shape = RampShape::Linear);

// The gain envelope itself, exposed for verification.
double crosstalk_gain(const SpeechIntervals& speech, double t, double ramp);

}  // namespace gesturegen::sig
