#pragma once

#include <sstream>
#include <string>

namespace gesturegen {

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace gesturegen
