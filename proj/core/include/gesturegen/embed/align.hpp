#pragma once

#include "gesturegen/embed/embedding.hpp"
#include "gesturegen/embed/transcript.hpp"
#include "gesturegen/motion/pose.hpp"

namespace gesturegen::embed {

// Spreads one vector per token across the frames covered by its time span.
// Frame f carries the vector of the token whose [round(start*rate),
// round(end*rate)) span contains f; later-starting tokens win overlaps, and
// uncovered frames stay zero. Spans are clipped to [0, frames).
EmbeddingSequence replicate_tokens(const TimedTranscript& transcript,
                                   const MatrixRM& token_vectors, double rate,
                                   std::size_t frames);

// All modality streams for one clip, truncated to a common length on one
// frame grid. Joint streams are audio columns then text columns per agent.
struct AlignedClip {
  motion::PoseSequence motion;
  MatrixRM main_joint;       // T x (d_audio + d_text)
  MatrixRM interloc_joint;   // T x (d_audio + d_text)
  double rate = 30.0;

  std::size_t frames() const { return static_cast<std::size_t>(main_joint.rows()); }
};

AlignedClip align_clip(const motion::PoseSequence& main_motion,
                       const EmbeddingSequence& main_audio,
                       const EmbeddingSequence& main_text,
                       const EmbeddingSequence& interloc_audio,
                       const EmbeddingSequence& interloc_text);

}  // namespace gesturegen::embed
