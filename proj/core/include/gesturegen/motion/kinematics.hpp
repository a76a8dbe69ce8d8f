#pragma once

#include <memory>

#include "gesturegen/common/matrix.hpp"
#include "gesturegen/motion/pose.hpp"

namespace gesturegen::motion {

// World-space joint positions, one 3-vector per joint per frame.
struct JointPositions {
  double frame_rate = 30.0;
  MatrixRM xyz;  // T x 3J
  std::shared_ptr<const Skeleton> skeleton;

  std::size_t frame_count() const { return static_cast<std::size_t>(xyz.rows()); }
  Eigen::Vector3d at(std::size_t frame, std::size_t joint) const {
    return xyz.block<1, 3>(static_cast<Eigen::Index>(frame),
                           static_cast<Eigen::Index>(3 * joint)).transpose();
  }
};

// Root sits at its translation (origin when translation is disabled); each
// child at parent position + parent world rotation * offset.
JointPositions forward_kinematics(const PoseSequence& pose,
                                  const ReferencePose& tpose = {});

}  // namespace gesturegen::motion
