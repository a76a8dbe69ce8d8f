#pragma once

#include <string>
#include <vector>

namespace gesturegen::sig {

struct AudioTrack {
  double sample_rate = 16000.0;
  std::vector<double> samples;  // mono, nominally in [-1, 1]

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavFormat { Pcm16, Float32 };

// Mono RIFF/WAVE only; 16-bit PCM and 32-bit float are supported.
AudioTrack read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioTrack& track,
               WavFormat format = WavFormat::Float32);

}  // namespace gesturegen::sig
