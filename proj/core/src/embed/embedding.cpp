#include "gesturegen/embed/embedding.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "gesturegen/common/binary_io.hpp"
#include "gesturegen/common/strings.hpp"

namespace gesturegen::embed {

namespace {
constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
}

void EmbeddingSequence::validate() const {
  if (rate <= 0) throw std::invalid_argument("embedding rate must be positive");
  if (dim() == 0) throw std::invalid_argument("embedding dim must be positive");
  if (!vectors.allFinite())
    throw std::invalid_argument("embedding contains non-finite entries");
}

void save_embeddings(const std::string& path, const EmbeddingSequence& seq) {
  seq.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(cat("cannot open '", path, "' for writing"));
  io::write_bytes(os, kMagic, 4);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(seq.vectors.rows()));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(seq.vectors.cols()));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(std::lround(seq.rate * 1000.0)));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(seq.modality));
  for (Eigen::Index r = 0; r < seq.vectors.rows(); ++r)
    for (Eigen::Index c = 0; c < seq.vectors.cols(); ++c)
      io::write_le<float>(os, static_cast<float>(seq.vectors(r, c)));
  if (!os) throw std::runtime_error(cat("write failed for '", path, "'"));
}

EmbeddingSequence load_embeddings(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(cat("cannot open embedding file '", path, "'"));
  char magic[4];
  io::read_bytes(is, magic, 4, "embedding magic");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(cat("'", path, "' is not an EMB1 file (bad magic)"));
  const auto rows = io::read_le<std::uint32_t>(is, "rows");
  const auto cols = io::read_le<std::uint32_t>(is, "cols");
  const auto rate_mhz = io::read_le<std::uint32_t>(is, "rate");
  const auto modality = io::read_le<std::uint32_t>(is, "modality");
  if (modality > static_cast<std::uint32_t>(Modality::Conditioning))
    throw std::runtime_error(cat("unknown modality code ", modality, " in '", path, "'"));

  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  std::vector<float> payload(count);
  is.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(float))
    throw std::runtime_error(cat("truncated payload in '", path, "': expected ",
                                 count * sizeof(float), " bytes, got ",
                                 is.gcount()));

  EmbeddingSequence seq;
  seq.rate = rate_mhz / 1000.0;
  seq.modality = static_cast<Modality>(modality);
  seq.vectors = MatrixRM::Zero(rows, cols);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(payload[i]))
      throw std::runtime_error(cat("non-finite entry ", i, " in '", path, "'"));
    seq.vectors(static_cast<Eigen::Index>(i / cols),
                static_cast<Eigen::Index>(i % cols)) = payload[i];
  }
  return seq;
}

}  // namespace gesturegen::embed
