#pragma once

#include "cogman/controller.hpp"
#include "cogman/planner.hpp"
#include "cogman/world.hpp"

namespace cogman {

/// Direct pose: drive the planned contact-rich segment with the stiff
/// contact-free gains to a target `overshoot` below the goal, open loop.
ControlCommand direct_pose_command(const SkillStep& step, const CoarsePolicy& plan,
                                   const SkillGraphSpec& spec, double overshoot);

/// Outward Archimedean spiral r = pitch * theta / 2pi, walked at a fixed feed
/// along the arc and capped at max_radius.
class SpiralSearch {
 public:
  SpiralSearch(double pitch, double feed, double max_radius);

  void advance(double dt);
  double theta() const { return theta_; }
  double radius() const;
  Vec2 offset() const;
  double max_radius() const { return max_radius_; }

 private:
  double pitch_;
  double feed_;
  double max_radius_;
  double theta_ = 0.0;
};

struct SpiralParams {
  double pitch = 0.0003;
  double feed = 0.002;
  double press = 6.0;       // N, downward F_d while searching
  double contact_fz = 2.0;  // N, contact detection threshold
};

/// Teach-and-search: follow the contact-rich segment pressing down; once the
/// surface is felt, hold the goal depth and walk the spiral around the
/// planned axis until the peg drops below the surface, then press home.
class SpiralController {
 public:
  SpiralController(const CoarsePolicy& plan, const TaskGeometry& geom, SpiralParams params);

  ControlCommand command(const SkillStep& step, const WorldState& state);
  bool searching() const { return searching_; }
  bool dropped() const { return dropped_; }
  const SpiralSearch& spiral() const { return spiral_; }

 private:
  CoarsePolicy plan_;
  SpiralParams params_;
  double surface_z_;  // EE height with the tip on the board top
  double hole_depth_;
  SpiralSearch spiral_;
  bool searching_ = false;
  bool dropped_ = false;
};

}  // namespace cogman
