#include "gesturegen/embed/align.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::embed {

namespace {
std::size_t frame_of(double seconds, double rate, std::size_t limit) {
  const double f = std::floor(seconds * rate + 0.5);  // round half up
  if (f <= 0) return 0;
  return std::min(static_cast<std::size_t>(f), limit);
}
}  // namespace

EmbeddingSequence replicate_tokens(const TimedTranscript& transcript,
                                   const MatrixRM& token_vectors, double rate,
                                   std::size_t frames) {
  if (static_cast<std::size_t>(token_vectors.rows()) != transcript.tokens.size())
    throw std::invalid_argument(
        cat("replicate_tokens: ", transcript.tokens.size(), " tokens but ",
            token_vectors.rows(), " vectors"));
  EmbeddingSequence out;
  out.rate = rate;
  out.modality = Modality::Text;
  out.vectors = MatrixRM::Zero(static_cast<Eigen::Index>(frames),
                               token_vectors.cols());
  // Tokens are sorted by start; writing in order makes later starts win.
  for (std::size_t t = 0; t < transcript.tokens.size(); ++t) {
    const Token& tok = transcript.tokens[t];
    const std::size_t f0 = frame_of(tok.start, rate, frames);
    const std::size_t f1 = frame_of(tok.end, rate, frames);
    for (std::size_t f = f0; f < f1; ++f)
      out.vectors.row(static_cast<Eigen::Index>(f)) =
          token_vectors.row(static_cast<Eigen::Index>(t));
  }
  return out;
}

AlignedClip align_clip(const motion::PoseSequence& main_motion,
                       const EmbeddingSequence& main_audio,
                       const EmbeddingSequence& main_text,
                       const EmbeddingSequence& interloc_audio,
                       const EmbeddingSequence& interloc_text) {
  const EmbeddingSequence* streams[] = {&main_audio, &main_text,
                                        &interloc_audio, &interloc_text};
  std::size_t frames = main_motion.frame_count();
  for (const auto* s : streams) {
    if (std::abs(s->rate - main_motion.frame_rate) > 1e-9)
      throw std::invalid_argument(
          cat("align_clip: stream rate ", s->rate, " Hz does not match motion ",
              main_motion.frame_rate, " Hz"));
    frames = std::min(frames, s->frames());
  }
  if (frames < 1)
    throw std::invalid_argument("align_clip: a stream has no frames");
  if (main_audio.dim() != interloc_audio.dim() ||
      main_text.dim() != interloc_text.dim())
    throw std::invalid_argument("align_clip: agent stream dims differ");

  AlignedClip clip;
  clip.rate = main_motion.frame_rate;
  clip.motion = main_motion;
  clip.motion.frames =
      main_motion.frames.topRows(static_cast<Eigen::Index>(frames));

  const auto t = static_cast<Eigen::Index>(frames);
  auto concat = [t](const EmbeddingSequence& a, const EmbeddingSequence& b) {
    MatrixRM out = MatrixRM::Zero(t, a.vectors.cols() + b.vectors.cols());
    out.leftCols(a.vectors.cols()) = a.vectors.topRows(t);
    out.rightCols(b.vectors.cols()) = b.vectors.topRows(t);
    return out;
  };
  clip.main_joint = concat(main_audio, main_text);
  clip.interloc_joint = concat(interloc_audio, interloc_text);
  return clip;
}

}  // namespace gesturegen::embed
