#include "gesturegen/motion/rotation.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace gesturegen::motion {

Eigen::Matrix3d rotation_about(Axis axis, double radians) {
  Eigen::Vector3d unit = Eigen::Vector3d::Zero();
  unit[static_cast<int>(axis)] = 1.0;
  return Eigen::AngleAxisd(radians, unit).toRotationMatrix();
}

Eigen::Matrix3d euler_to_matrix(const std::array<Axis, 3>& order,
                                const Eigen::Vector3d& radians) {
  return rotation_about(order[0], radians[0]) *
         rotation_about(order[1], radians[1]) *
         rotation_about(order[2], radians[2]);
}

Eigen::Vector3d matrix_to_euler(const std::array<Axis, 3>& order,
                                const Eigen::Matrix3d& rot) {
  const int i = static_cast<int>(order[0]);
  const int j = static_cast<int>(order[1]);
  const int k = static_cast<int>(order[2]);
  // Parity of the axis triple: +1 for cyclic (XYZ, YZX, ZXY).
  const double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;

  const double s2 = std::clamp(eps * rot(i, k), -1.0, 1.0);
  Eigen::Vector3d angles;
  angles[1] = std::asin(s2);
  if (std::abs(s2) < 1.0 - 1e-12) {
    angles[0] = std::atan2(-eps * rot(j, k), rot(k, k));
    angles[2] = std::atan2(-eps * rot(i, j), rot(i, i));
  } else {
    // Gimbal lock: only angle0 +- angle2 is determined. Fix angle2 = 0.
    angles[0] = std::atan2(eps * rot(k, j), rot(j, j));
    angles[2] = 0.0;
  }
  return angles;
}

Eigen::Vector3d log_rotation(const Eigen::Matrix3d& rot) {
  Eigen::Quaterniond q(rot);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;  // angle in [0, pi]

  const double sin_half = q.vec().norm();
  const double angle = 2.0 * std::atan2(sin_half, q.w());
  Eigen::Vector3d v;
  if (sin_half < 1e-12) {
    v = 2.0 * q.vec();  // first-order: axis*angle ~ 2*vec for tiny angles
  } else {
    v = (angle / sin_half) * q.vec();
  }
  if (angle > M_PI - 1e-9) {
    // Antipodal ambiguity: pick the sign that makes the first nonzero
    // component positive.
    for (int c = 0; c < 3; ++c) {
      if (std::abs(v[c]) > 1e-12) {
        if (v[c] < 0) v = -v;
        break;
      }
    }
  }
  return v;
}

Eigen::Matrix3d exp_rotation(const Eigen::Vector3d& expmap) {
  const double angle = expmap.norm();
  // sin(a/2)/a is smooth; use its series below the noise floor.
  const double half_sinc =
      angle < 1e-8 ? 0.5 - angle * angle / 48.0 : std::sin(angle / 2.0) / angle;
  Eigen::Quaterniond q;
  q.w() = std::cos(angle / 2.0);
  q.vec() = half_sinc * expmap;
  return q.toRotationMatrix();
}

}  // namespace gesturegen::motion
