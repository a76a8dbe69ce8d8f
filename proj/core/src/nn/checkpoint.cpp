#include "gesturegen/nn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "gesturegen/common/binary_io.hpp"
#include "gesturegen/common/strings.hpp"

namespace gesturegen::nn {

namespace {
constexpr char kMagic[4] = {'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_string(std::ostream& os, const std::string& s) {
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  io::write_bytes(os, s.data(), s.size());
}

std::string read_string(std::istream& is) {
  const auto len = io::read_le<std::uint32_t>(is, "string length");
  std::string s(len, '\0');
  io::read_bytes(is, s.data(), len, "string");
  return s;
}
}  // namespace

double ModelCheckpoint::hyper_required(const std::string& key) const {
  auto it = hyper.find(key);
  if (it == hyper.end())
    throw std::runtime_error(cat("checkpoint missing hyperparameter '", key, "'"));
  return it->second;
}

const Tensor<float>& ModelCheckpoint::param_required(
    const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end())
    throw std::runtime_error(cat("checkpoint missing parameter '", key, "'"));
  return it->second;
}

void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(cat("cannot open '", path, "' for writing"));
  io::write_bytes(os, kMagic, 4);
  io::write_le<std::uint32_t>(os, kVersion);
  io::write_le<std::uint64_t>(os, ckpt.step);
  io::write_le<std::uint64_t>(os, ckpt.seed);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.hyper.size()));
  for (const auto& [name, value] : ckpt.hyper) {
    write_string(os, name);
    io::write_le<double>(os, value);
  }
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, t] : ckpt.params) {
    write_string(os, name);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.rows));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.cols));
    io::write_bytes(os, t.data.data(), t.data.size() * sizeof(float));
  }
  if (!os) throw std::runtime_error(cat("write failed for '", path, "'"));
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(cat("cannot open checkpoint '", path, "'"));
  char magic[4];
  io::read_bytes(is, magic, 4, "checkpoint magic");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(cat("'", path, "' is not a checkpoint (bad magic)"));
  const auto version = io::read_le<std::uint32_t>(is, "version");
  if (version != kVersion)
    throw std::runtime_error(cat("unsupported checkpoint version ", version));
  ModelCheckpoint ckpt;
  ckpt.step = io::read_le<std::uint64_t>(is, "step");
  ckpt.seed = io::read_le<std::uint64_t>(is, "seed");
  const auto n_hyper = io::read_le<std::uint32_t>(is, "hyper count");
  for (std::uint32_t i = 0; i < n_hyper; ++i) {
    std::string name = read_string(is);
    ckpt.hyper[name] = io::read_le<double>(is, "hyper value");
  }
  const auto n_params = io::read_le<std::uint32_t>(is, "param count");
  for (std::uint32_t i = 0; i < n_params; ++i) {
    std::string name = read_string(is);
    const auto rows = io::read_le<std::uint32_t>(is, "rows");
    const auto cols = io::read_le<std::uint32_t>(is, "cols");
    Tensor<float> t(rows, cols);
    io::read_bytes(is, t.data.data(), t.data.size() * sizeof(float),
                   cat("parameter '", name, "'"));
    ckpt.params.emplace(std::move(name), std::move(t));
  }
  return ckpt;
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(cat("cannot open '", path, "' for hashing"));
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!is) break;
  }
  return h;
}

}  // namespace gesturegen::nn
