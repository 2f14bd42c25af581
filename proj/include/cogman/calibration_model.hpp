#pragma once

#include <Eigen/Core>

#include "cogman/geometry.hpp"

namespace cogman {

using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat4 = Eigen::Matrix4d;

/// Fitted maps between the robot frame and the two pixel frames.
///  A:    robot (x, y, 1) -> eye-to-hand pixel
///  Binv: eye-to-hand pixel (u, v, 1) -> robot (x, y)
///  C:    task-frame EE offset (dx, dy, dz, 1) -> eye-in-hand hole box corners
///        (left u, left v, right u, right v) relative to the principal point
struct CalibrationModel {
  Mat23 A = Mat23::Zero();
  Mat23 Binv = Mat23::Zero();
  Mat4 C = Mat4::Zero();
  // Per-output residual standard deviations of each fit.
  Vec2 std_fwd = Vec2::Zero();  // px
  Vec2 std_inv = Vec2::Zero();  // m
  Vec4 std_jac = Vec4::Zero();  // px
  bool has_eye_to_hand = false;
  bool has_eye_in_hand = false;

  Vec2 robot_to_pixel(const Vec2& p) const;
  Vec2 pixel_to_robot(const Vec2& px) const;
  Vec4 corner_offsets(const Vec3& offset) const;
};

}  // namespace cogman
