#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gesturegen::motion {

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

struct Channel {
  enum class Kind : std::uint8_t { Rotation, Position };
  Kind kind;
  Axis axis;
};

// Articulated joint. `parent` is -1 for the root; parents always precede
// children (topological order), which the parser guarantees and validate()
// re-checks.
struct Joint {
  std::string name;
  int parent = -1;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  std::vector<Channel> channels;

  // The three rotation axes in application order.
  std::array<Axis, 3> rotation_order() const;
  bool has_position_channels() const;
};

// Leaf offsets (BVH "End Site" blocks); kept for lossless serialization.
struct EndSite {
  int parent = -1;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
};

struct Skeleton {
  std::vector<Joint> joints;
  std::vector<EndSite> end_sites;

  std::size_t joint_count() const { return joints.size(); }
  std::size_t total_channels() const;
  int find_joint(const std::string& name) const;

  // Throws std::invalid_argument on: no joints, multiple roots, parent index
  // not strictly below the child's, repeated rotation axes, or position
  // channels on a non-root joint.
  void validate() const;
};

}  // namespace gesturegen::motion
