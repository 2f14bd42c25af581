#include "cogman/executor.hpp"

#include <algorithm>

namespace cogman {

TickSummary execute(const World& world, const WorldState& state, const Vec4& v,
                    const ControlCommand& cmd, int ticks) {
  const GainSet gains = GainSet::critically_damped(cmd.K);
  TickSummary out;
  out.state = state;
  out.v = v;
  ControlCommand c = cmd;
  for (int k = 0; k < ticks; ++k) {
    c.X_d = cmd.setpoint(k * kControlDt);
    out.v = admittance_step(c, out.state.ee_pose, out.state.contact_wrench, out.v, gains);
    out.state = world.step(out.state, out.v, kControlDt);
    out.max_force = std::max(out.max_force, out.state.contact_wrench.vec().head<3>().norm());
    out.max_board_load = std::max(out.max_board_load, out.state.board_load_ratio);
    out.board_moved = out.board_moved || out.state.board_moved;
  }
  return out;
}

}  // namespace cogman
