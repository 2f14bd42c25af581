#pragma once

#include "cogman/controller.hpp"
#include "cogman/world.hpp"

namespace cogman {

struct TickSummary {
  WorldState state;
  Vec4 v = Vec4::Zero();          // admittance velocity carried to the next tick
  double max_force = 0.0;         // largest contact force norm seen (N)
  double max_board_load = 0.0;    // largest board load / static threshold ratio
  bool board_moved = false;
};

/// Runs `ticks` control ticks of the admittance loop against the world with
/// stiffness cmd.K, critically damped. The set-point follows cmd.segment when
/// present.
TickSummary execute(const World& world, const WorldState& state, const Vec4& v,
                    const ControlCommand& cmd, int ticks = kTicksPerPolicyStep);

}  // namespace cogman
