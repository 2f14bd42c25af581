#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace cogman {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
// Task-space vector ordered (x, y, z, rz); the four active DOFs.
using Vec4 = Eigen::Vector4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Rigid pose with the full 6-field layout. Only x, y, z and rz are dynamic;
/// rx and ry stay at zero for every pose produced by this library.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;

  static Pose planar(double x, double y, double z, double rz);
  static Pose from_task(const Vec4& v);
  Vec4 task() const { return {x, y, z, rz}; }
  Vec2 xy() const { return {x, y}; }
};

struct Wrench {
  double fx = 0.0;
  double fy = 0.0;
  double fz = 0.0;
  double tz = 0.0;

  static Wrench from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
  Vec4 vec() const { return {fx, fy, fz, tz}; }
  bool finite() const;
};

/// Componentwise clamp of `w` into [-limit, limit].
Wrench clamp(const Wrench& w, const Wrench& limit);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

struct WorkspaceSpec {
  Interval x_range{0.0, 0.35};
  Interval y_range{0.0, 0.35};
  Interval rz_range{-0.5, 0.5};
  double z_con = 0.0;  // table height the board rests on
  double rx_con = 0.0;
  double ry_con = 0.0;
  // End-effector home; kept outside the x/y region so it never occludes the
  // eye-to-hand view of the board.
  Pose home = Pose::planar(-0.12, 0.175, 0.25, 0.0);

  void validate() const;
  /// True when (x, y, rz) of `p` lie in the unconstrained region.
  bool contains(const Pose& p) const;
};

/// Planar SE(2) composition on (x, y, rz) with additive z.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

/// (a - b) on the task DOFs, yaw difference wrapped.
Vec4 task_difference(const Pose& a, const Pose& b);

Vec2 rotate(const Vec2& v, double angle);

/// Uniform pose over the workspace; z = z_con, rx = ry = 0. Deterministic per seed.
Pose sample_uniform(const WorkspaceSpec& ws, std::uint64_t seed);

/// Independent sub-stream seed (splitmix64 of seed and stream id).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) from 53 random bits.
template <typename Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cogman
