#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::io {

// Little-endian scalar I/O. The build targets little-endian hosts only; a
// byte-order check at read time would be dead code on every machine this
// runs on, so values are memcpy'd directly.

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const std::string& what) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error(cat("truncated read of ", what));
  return value;
}

inline void write_bytes(std::ostream& os, const void* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* data, std::size_t n,
                       const std::string& what) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw std::runtime_error(cat("truncated payload in ", what, ": expected ", n,
                                 " bytes, got ", is.gcount()));
  }
}

}  // namespace gesturegen::io
