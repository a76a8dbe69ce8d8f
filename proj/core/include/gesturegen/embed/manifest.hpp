#pragma once

#include <string>
#include <vector>

namespace gesturegen::embed {

// One dataset clip. Paths are resolved relative to the manifest's directory.
struct ManifestEntry {
  std::string clip_id;
  std::string motion_path;
  std::string main_audio_path;
  std::string interloc_audio_path;
  std::string main_transcript_path;
  std::string interloc_transcript_path;
};

// Tab-separated, one clip per line:
// id<TAB>motion.bvh<TAB>main.wav<TAB>interloc.wav<TAB>main.tsv<TAB>interloc.tsv
std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace gesturegen::embed
