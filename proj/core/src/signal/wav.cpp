#include "gesturegen/signal/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gesturegen/common/binary_io.hpp"
#include "gesturegen/common/strings.hpp"

namespace gesturegen::sig {

namespace {
constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
}  // namespace

AudioTrack read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(cat("cannot open wav file '", path, "'"));

  char tag[4];
  io::read_bytes(is, tag, 4, "RIFF tag");
  if (std::memcmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error(cat("'", path, "' is not a RIFF file"));
  io::read_le<std::uint32_t>(is, "riff size");
  io::read_bytes(is, tag, 4, "WAVE tag");
  if (std::memcmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error(cat("'", path, "' is not a WAVE file"));

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  AudioTrack track;

  while (is.peek() != EOF) {
    io::read_bytes(is, tag, 4, "chunk id");
    const auto size = io::read_le<std::uint32_t>(is, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = io::read_le<std::uint16_t>(is, "format");
      channels = io::read_le<std::uint16_t>(is, "channels");
      rate = io::read_le<std::uint32_t>(is, "sample rate");
      io::read_le<std::uint32_t>(is, "byte rate");
      io::read_le<std::uint16_t>(is, "block align");
      bits = io::read_le<std::uint16_t>(is, "bits per sample");
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw std::runtime_error("wav data chunk before fmt chunk");
      if (channels != 1)
        throw std::runtime_error(cat("'", path, "' has ", channels,
                                     " channels; mono required"));
      if (format == kFormatPcm && bits == 16) {
        const std::size_t n = size / 2;
        std::vector<std::int16_t> raw(n);
        io::read_bytes(is, raw.data(), size, "wav samples");
        track.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
          track.samples[i] = raw[i] / 32768.0;
      } else if (format == kFormatFloat && bits == 32) {
        const std::size_t n = size / 4;
        std::vector<float> raw(n);
        io::read_bytes(is, raw.data(), size, "wav samples");
        track.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
          track.samples[i] = static_cast<double>(raw[i]);
      } else {
        throw std::runtime_error(
            cat("unsupported wav encoding: format ", format, ", ", bits, " bits"));
      }
      track.sample_rate = rate;
      return track;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);  // chunks are word-aligned
    }
  }
  throw std::runtime_error(cat("'", path, "' has no data chunk"));
}

void write_wav(const std::string& path, const AudioTrack& track,
               WavFormat format) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(cat("cannot open '", path, "' for writing"));

  const bool pcm = format == WavFormat::Pcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto data_size =
      static_cast<std::uint32_t>(track.samples.size() * bytes_per_sample);

  io::write_bytes(os, "RIFF", 4);
  io::write_le<std::uint32_t>(os, 36 + data_size);
  io::write_bytes(os, "WAVE", 4);
  io::write_bytes(os, "fmt ", 4);
  io::write_le<std::uint32_t>(os, 16);
  io::write_le<std::uint16_t>(os, pcm ? kFormatPcm : kFormatFloat);
  io::write_le<std::uint16_t>(os, 1);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(track.sample_rate));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(track.sample_rate) *
                                      bytes_per_sample);
  io::write_le<std::uint16_t>(os, bytes_per_sample);
  io::write_le<std::uint16_t>(os, pcm ? 16 : 32);
  io::write_bytes(os, "data", 4);
  io::write_le<std::uint32_t>(os, data_size);
  if (pcm) {
    for (double s : track.samples) {
      const double clipped = std::clamp(s, -1.0, 1.0);
      io::write_le<std::int16_t>(
          os, static_cast<std::int16_t>(std::lrint(clipped * 32767.0)));
    }
  } else {
    for (double s : track.samples)
      io::write_le<float>(os, static_cast<float>(s));
  }
  if (!os) throw std::runtime_error(cat("write failed for '", path, "'"));
}

}  // namespace gesturegen::sig
