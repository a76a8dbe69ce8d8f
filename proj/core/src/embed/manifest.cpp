#include "gesturegen/embed/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::embed {

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(cat("cannot open manifest '", path, "'"));
  const auto base = std::filesystem::path(path).parent_path();

  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 6)
      throw std::runtime_error(cat("manifest '", path, "' line ", lineno,
                                   ": expected 6 tab-separated fields, got ",
                                   fields.size()));
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    entries.push_back(ManifestEntry{fields[0], resolve(fields[1]),
                                    resolve(fields[2]), resolve(fields[3]),
                                    resolve(fields[4]), resolve(fields[5])});
  }
  if (entries.empty())
    throw std::runtime_error(cat("manifest '", path, "' lists no clips"));
  return entries;
}

}  // namespace gesturegen::embed
