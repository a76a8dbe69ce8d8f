#pragma once

#include <string>
#include <vector>

#include "gesturegen/signal/gate.hpp"

namespace gesturegen::embed {

struct Token {
  std::string text;
  double start = 0;  // seconds
  double end = 0;
};

struct TimedTranscript {
  std::vector<Token> tokens;  // sorted by start time
};

// One token per line: start_seconds<TAB>end_seconds<TAB>token (UTF-8).
TimedTranscript load_transcript(const std::string& path);
void save_transcript(const std::string& path, const TimedTranscript& transcript);

// Token spans merged into sorted, non-overlapping speech intervals.
sig::SpeechIntervals speech_intervals(const TimedTranscript& transcript);

}  // namespace gesturegen::embed
