#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gesturegen/nn/tensor.hpp"

namespace gesturegen::nn {

// Serialized model state. Parameter records are written sorted by name and
// the format has no timestamps or padding, so identical content produces
// identical bytes (and load followed by save is a byte-level no-op).
//
// Layout (little endian):
//   magic "CKPT" | u32 version | u64 step | u64 seed
//   u32 n_hyper  | n_hyper x { u32 len, bytes, f64 value }
//   u32 n_params | n_params x { u32 len, bytes, u32 rows, u32 cols, f32 data }
struct ModelCheckpoint {
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> hyper;
  std::map<std::string, Tensor<float>> params;

  double hyper_or(const std::string& key, double fallback) const {
    auto it = hyper.find(key);
    return it == hyper.end() ? fallback : it->second;
  }
  double hyper_required(const std::string& key) const;
  const Tensor<float>& param_required(const std::string& key) const;
};

void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::string& path);

// FNV-1a over the file bytes, used to stamp synthesis metadata.
std::uint64_t file_hash(const std::string& path);

}  // namespace gesturegen::nn
