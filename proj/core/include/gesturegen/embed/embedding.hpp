#pragma once

#include <cstdint>
#include <string>

#include "gesturegen/common/matrix.hpp"

namespace gesturegen::embed {

enum class Modality : std::uint32_t {
  Audio = 0,
  Text = 1,
  Joint = 2,
  Conditioning = 3,
};

// Per-frame feature stream with rate metadata: raw encoder outputs, the
// concatenated per-agent inputs, or the final conditioning signal.
struct EmbeddingSequence {
  double rate = 50.0;  // Hz
  Modality modality = Modality::Audio;
  MatrixRM vectors;  // T x d

  std::size_t frames() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  void validate() const;
};

// Binary container: magic "EMB1", u32 LE {rows, cols, rate_mHz, modality},
// then rows*cols float32 LE, row-major.
void save_embeddings(const std::string& path, const EmbeddingSequence& seq);
EmbeddingSequence load_embeddings(const std::string& path);

}  // namespace gesturegen::embed
