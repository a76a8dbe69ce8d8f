#include "gesturegen/embed/transcript.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::embed {

TimedTranscript load_transcript(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(cat("cannot open transcript '", path, "'"));
  TimedTranscript out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                                : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw std::runtime_error(cat("transcript '", path, "' line ", lineno,
                                   ": expected start<TAB>end<TAB>token"));
    Token tok;
    try {
      tok.start = std::stod(line.substr(0, tab1));
      tok.end = std::stod(line.substr(tab1 + 1, tab2 - tab1 - 1));
    } catch (const std::exception&) {
      throw std::runtime_error(cat("transcript '", path, "' line ", lineno,
                                   ": bad time value"));
    }
    tok.text = line.substr(tab2 + 1);
    if (tok.start > tok.end)
      throw std::runtime_error(cat("transcript '", path, "' line ", lineno,
                                   ": start after end"));
    out.tokens.push_back(std::move(tok));
  }
  std::stable_sort(out.tokens.begin(), out.tokens.end(),
                   [](const Token& a, const Token& b) { return a.start < b.start; });
  return out;
}

void save_transcript(const std::string& path, const TimedTranscript& transcript) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(cat("cannot open '", path, "' for writing"));
  char buf[64];
  for (const Token& t : transcript.tokens) {
    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t", t.start, t.end);
    os << buf << t.text << "\n";
  }
}

sig::SpeechIntervals speech_intervals(const TimedTranscript& transcript) {
  sig::SpeechIntervals out;
  for (const Token& t : transcript.tokens)
    if (t.start < t.end) out.spans.push_back({t.start, t.end});
  out.normalize();
  return out;
}

}  // namespace gesturegen::embed
