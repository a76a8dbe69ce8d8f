#include "gesturegen/motion/pose.hpp"

#include <cmath>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"
#include "gesturegen/motion/rotation.hpp"

namespace gesturegen::motion {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

void check_tpose(const Skeleton& skel, const ReferencePose& tpose) {
  if (!tpose.empty() && tpose.size() != skel.joint_count())
    throw std::invalid_argument(
        cat("reference pose has ", tpose.size(), " rotations for ",
            skel.joint_count(), " joints"));
}
}  // namespace

void PoseSequence::validate() const {
  if (!skeleton) throw std::invalid_argument("pose sequence has no skeleton");
  if (frame_count() < 1) throw std::invalid_argument("pose sequence is empty");
  if (dim() != expected_dim())
    throw std::invalid_argument(cat("pose dim ", dim(), " does not match skeleton (",
                                    expected_dim(), ")"));
  const std::size_t joints = skeleton->joint_count();
  for (std::size_t t = 0; t < frame_count(); ++t)
    for (std::size_t j = 0; j < joints; ++j) {
      const double a =
          frames.block<1, 3>(static_cast<Eigen::Index>(t),
                             static_cast<Eigen::Index>(3 * j)).norm();
      if (!(a <= M_PI + 1e-9))
        throw std::invalid_argument(
            cat("expmap magnitude ", a, " out of [0, pi] at frame ", t,
                " joint ", j));
    }
}

ReferencePose load_reference_pose(const std::string& bvh_path) {
  const BvhDocument doc = parse_bvh_file(bvh_path);
  const Skeleton& skel = *doc.skeleton;
  ReferencePose tpose(skel.joint_count());
  std::size_t col = 0;
  for (std::size_t j = 0; j < skel.joint_count(); ++j) {
    const Joint& joint = skel.joints[j];
    Eigen::Vector3d angles = Eigen::Vector3d::Zero();
    std::size_t rot_n = 0;
    for (const Channel& ch : joint.channels) {
      const double v = doc.frames(0, static_cast<Eigen::Index>(col++));
      if (ch.kind == Channel::Kind::Rotation) angles[static_cast<int>(rot_n++)] = v;
    }
    tpose[j] = euler_to_matrix(joint.rotation_order(), angles * kDegToRad);
  }
  return tpose;
}

PoseSequence to_expmap(const BvhDocument& doc, const ReferencePose& tpose,
                       bool include_root_translation) {
  const Skeleton& skel = *doc.skeleton;
  check_tpose(skel, tpose);
  const std::size_t joints = skel.joint_count();
  const auto n_frames = static_cast<std::size_t>(doc.frames.rows());
  if (n_frames < 1) throw std::invalid_argument("motion has no frames");

  PoseSequence pose;
  pose.frame_rate = doc.frame_rate();
  pose.skeleton = doc.skeleton;
  pose.has_root_translation = include_root_translation;
  pose.frames = MatrixRM::Zero(
      static_cast<Eigen::Index>(n_frames),
      static_cast<Eigen::Index>(3 * joints + (include_root_translation ? 3 : 0)));

  for (std::size_t t = 0; t < n_frames; ++t) {
    std::size_t col = 0;
    for (std::size_t j = 0; j < joints; ++j) {
      const Joint& joint = skel.joints[j];
      Eigen::Vector3d angles = Eigen::Vector3d::Zero();
      Eigen::Vector3d position = Eigen::Vector3d::Zero();
      std::size_t rot_n = 0;
      for (const Channel& ch : joint.channels) {
        const double v = doc.frames(static_cast<Eigen::Index>(t),
                                    static_cast<Eigen::Index>(col++));
        if (ch.kind == Channel::Kind::Rotation) {
          angles[static_cast<int>(rot_n++)] = v;
        } else {
          position[static_cast<int>(ch.axis)] = v;
        }
      }
      if (!angles.allFinite())
        throw std::invalid_argument(cat("non-finite rotation at frame ", t));
      Eigen::Matrix3d rot =
          euler_to_matrix(joint.rotation_order(), angles * kDegToRad);
      if (!tpose.empty()) rot = tpose[j].transpose() * rot;
      pose.frames.block<1, 3>(static_cast<Eigen::Index>(t),
                              static_cast<Eigen::Index>(3 * j)) =
          log_rotation(rot).transpose();
      if (j == 0 && include_root_translation)
        pose.frames.block<1, 3>(static_cast<Eigen::Index>(t),
                                static_cast<Eigen::Index>(3 * joints)) =
            position.transpose();
    }
  }
  return pose;
}

BvhDocument from_expmap(const PoseSequence& pose, const ReferencePose& tpose) {
  pose.validate();
  const Skeleton& skel = *pose.skeleton;
  check_tpose(skel, tpose);
  const std::size_t joints = skel.joint_count();
  const auto n_frames = pose.frame_count();

  BvhDocument doc;
  doc.skeleton = pose.skeleton;
  doc.frame_time = 1.0 / pose.frame_rate;
  doc.frames = MatrixRM::Zero(static_cast<Eigen::Index>(n_frames),
                              static_cast<Eigen::Index>(skel.total_channels()));

  for (std::size_t t = 0; t < n_frames; ++t) {
    std::size_t col = 0;
    for (std::size_t j = 0; j < joints; ++j) {
      const Joint& joint = skel.joints[j];
      Eigen::Matrix3d rot = exp_rotation(
          pose.frames.block<1, 3>(static_cast<Eigen::Index>(t),
                                  static_cast<Eigen::Index>(3 * j)).transpose());
      if (!tpose.empty()) rot = tpose[j] * rot;
      const Eigen::Vector3d angles =
          matrix_to_euler(joint.rotation_order(), rot) * kRadToDeg;
      Eigen::Vector3d position = Eigen::Vector3d::Zero();
      if (j == 0 && pose.has_root_translation)
        position = pose.frames.block<1, 3>(static_cast<Eigen::Index>(t),
                                           static_cast<Eigen::Index>(3 * joints))
                       .transpose();
      std::size_t rot_n = 0;
      for (const Channel& ch : joint.channels) {
        double v = 0.0;
        if (ch.kind == Channel::Kind::Rotation) {
          v = angles[static_cast<int>(rot_n++)];
        } else {
          v = position[static_cast<int>(ch.axis)];
        }
        doc.frames(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(col++)) = v;
      }
    }
  }
  return doc;
}

}  // namespace gesturegen::motion
