#include "gesturegen/motion/kinematics.hpp"

#include <vector>

#include "gesturegen/motion/rotation.hpp"

namespace gesturegen::motion {

JointPositions forward_kinematics(const PoseSequence& pose,
                                  const ReferencePose& tpose) {
  pose.validate();
  const Skeleton& skel = *pose.skeleton;
  const std::size_t joints = skel.joint_count();
  const std::size_t frames = pose.frame_count();

  JointPositions out;
  out.frame_rate = pose.frame_rate;
  out.skeleton = pose.skeleton;
  out.xyz = MatrixRM::Zero(static_cast<Eigen::Index>(frames),
                           static_cast<Eigen::Index>(3 * joints));

  std::vector<Eigen::Matrix3d> world_rot(joints);
  std::vector<Eigen::Vector3d> world_pos(joints);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t j = 0; j < joints; ++j) {
      Eigen::Matrix3d local = exp_rotation(
          pose.frames.block<1, 3>(static_cast<Eigen::Index>(t),
                                  static_cast<Eigen::Index>(3 * j)).transpose());
      if (!tpose.empty()) local = tpose[j] * local;
      const int parent = skel.joints[j].parent;
      if (parent < 0) {
        world_rot[j] = local;
        world_pos[j] = Eigen::Vector3d::Zero();
        if (pose.has_root_translation)
          world_pos[j] = pose.frames.block<1, 3>(
              static_cast<Eigen::Index>(t),
              static_cast<Eigen::Index>(3 * joints)).transpose();
      } else {
        const auto p = static_cast<std::size_t>(parent);
        world_rot[j] = world_rot[p] * local;
        world_pos[j] = world_pos[p] + world_rot[p] * skel.joints[j].offset;
      }
      out.xyz.block<1, 3>(static_cast<Eigen::Index>(t),
                          static_cast<Eigen::Index>(3 * j)) =
          world_pos[j].transpose();
    }
  }
  return out;
}

}  // namespace gesturegen::motion
