#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "gesturegen/common/matrix.hpp"
#include "gesturegen/motion/skeleton.hpp"

namespace gesturegen::motion {

// A parsed BVH file: hierarchy plus per-frame channel values in the file's
// native layout (rotations in degrees, positions in skeleton units).
struct BvhDocument {
  std::shared_ptr<const Skeleton> skeleton;
  double frame_time = 1.0 / 30.0;
  MatrixRM frames;  // T x total_channels

  double frame_rate() const { return 1.0 / frame_time; }
};

// Parses HIERARCHY + MOTION. Errors carry the 1-based line number of the
// offending input: malformed header, channel/value count mismatch on a frame
// line, non-positive frame time.
BvhDocument parse_bvh(std::istream& in);
BvhDocument parse_bvh_file(const std::string& path);

void serialize_bvh(const BvhDocument& doc, std::ostream& out);
void write_bvh_file(const BvhDocument& doc, const std::string& path);

}  // namespace gesturegen::motion
