#pragma once

#include <cstdint>

#include "gesturegen/embed/embedding.hpp"
#include "gesturegen/embed/transcript.hpp"
#include "gesturegen/signal/audio.hpp"

namespace gesturegen::embed {

// Seed for the fixed random projections in the fallback featurizers. Changing
// it changes every fallback embedding, so features computed under different
// seeds must never be mixed.
constexpr std::uint64_t kDefaultFeatureSeed = 1234567;

constexpr std::size_t kEmbeddingDim = 768;

// Deterministic stand-in for a pretrained audio encoder: log-mel filterbank
// frames (25 ms window, 20 ms hop -> 50 Hz) projected to 768 dimensions by a
// seeded random matrix. Requires 16 kHz mono; output has ceil(n/hop) frames,
// so one second gives exactly 50.
EmbeddingSequence fallback_audio_features(
    const sig::AudioTrack& audio, std::uint64_t seed = kDefaultFeatureSeed);

// Deterministic stand-in for a pretrained text encoder: one 768-d unit-scale
// vector per token, seeded by the token's bytes.
MatrixRM fallback_token_vectors(const TimedTranscript& transcript,
                                std::uint64_t seed = kDefaultFeatureSeed);

}  // namespace gesturegen::embed
