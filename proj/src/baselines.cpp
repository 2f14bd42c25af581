#include "cogman/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "cogman/errors.hpp"

namespace cogman {

ControlCommand direct_pose_command(const SkillStep& step, const CoarsePolicy& plan,
                                   const SkillGraphSpec& spec, double overshoot) {
  ControlCommand c = step.cmd;
  c.K = spec.K_cf;
  if (c.segment) {
    Pose target = plan.goal;
    target.z -= overshoot;
    c.segment->goal = target;
    c.X_d = c.segment->at(0.0);
  }
  c.F_d = Wrench{};
  return c;
}

SpiralSearch::SpiralSearch(double pitch, double feed, double max_radius)
    : pitch_(pitch), feed_(feed), max_radius_(max_radius) {
  if (!(pitch > 0.0) || !(feed > 0.0) || !(max_radius >= 0.0)) {
    throw ConfigError("spiral needs positive pitch and feed and a non-negative radius");
  }
}

double SpiralSearch::radius() const {
  return std::min(max_radius_, pitch_ * theta_ / (2.0 * kPi));
}

Vec2 SpiralSearch::offset() const {
  const double r = radius();
  return {r * std::cos(theta_), r * std::sin(theta_)};
}

void SpiralSearch::advance(double dt) {
  // ds = sqrt(r^2 + (dr/dtheta)^2) dtheta, integrated in small pieces.
  const double b = pitch_ / (2.0 * kPi);
  double remaining = feed_ * dt;
  const double piece = 0.05 * pitch_;
  while (remaining > 0.0) {
    const double ds = std::min(piece, remaining);
    const double r = b * theta_;
    theta_ += ds / std::sqrt(r * r + b * b);
    remaining -= ds;
  }
}

SpiralController::SpiralController(const CoarsePolicy& plan, const TaskGeometry& geom,
                                   SpiralParams params)
    : plan_(plan),
      params_(params),
      surface_z_(plan.goal.z + geom.hole_depth),
      hole_depth_(geom.hole_depth),
      spiral_(params.pitch, params.feed, plan.W[0]) {}

ControlCommand SpiralController::command(const SkillStep& step, const WorldState& state) {
  ControlCommand c = step.cmd;
  c.F_d = Wrench{0.0, 0.0, params_.press, 0.0};
  // Below the surface by a quarter of the hole depth: the peg has dropped in.
  if (state.ee_pose.z < surface_z_ - 0.25 * hole_depth_) dropped_ = true;
  if (!searching_ && !dropped_ && state.contact_wrench.fz > params_.contact_fz) searching_ = true;
  if (!searching_) return c;

  if (!dropped_) spiral_.advance(kPolicyDt);
  const Vec2 off = rotate(spiral_.offset(), plan_.goal.rz);
  c.segment.reset();
  c.X_d = Pose::planar(plan_.goal.x + off.x(), plan_.goal.y + off.y(), plan_.goal.z, plan_.goal.rz);
  return c;
}

}  // namespace cogman
