#pragma once

#include <optional>

#include "cogman/geometry.hpp"

namespace cogman {

inline constexpr double kControlDt = 1.0 / 120.0;
inline constexpr int kTicksPerPolicyStep = 24;  // 120 Hz control under a 5 Hz policy
inline constexpr double kPolicyDt = kControlDt * kTicksPerPolicyStep;

/// Stiffness K, virtual inertia M and damping B per task axis (x, y, z, rz).
/// The Jacobian between task and joint space is the identity here.
struct GainSet {
  Vec4 K;
  Vec4 M;
  Vec4 B;

  GainSet(const Vec4& k, const Vec4& m, const Vec4& b);

  static Vec4 default_inertia() { return {1.0, 1.0, 1.0, 0.01}; }
  static GainSet critically_damped(const Vec4& k, const Vec4& m = default_inertia(),
                                   double zeta = 1.0);
  Vec4 damping_ratio() const;
};

/// Min-jerk segment the set-point follows between policy steps; `t` is the
/// elapsed segment time at the start of the command.
struct TrajectorySegment {
  Pose start;
  Pose goal;
  double duration = 0.0;
  double t = 0.0;

  Pose at(double elapsed) const;
};

struct ControlCommand {
  Pose X_d;
  Wrench F_d;
  Vec4 K = Vec4::Zero();
  // When set, X_d is re-sampled from the segment at every control tick.
  std::optional<TrajectorySegment> segment;

  Pose setpoint(double elapsed) const { return segment ? segment->at(elapsed) : X_d; }
};

/// One control tick of  M dv/dt + B v = K (X_d - X) + (F - F_d).
/// Spring and damper are taken at the end of the tick (v' and X + dt v'),
/// the measured wrench at the start. Returns v', the task-space velocity
/// command. Throws NumericalError on non-finite input or output.
Vec4 admittance_step(const ControlCommand& cmd, const Pose& X, const Wrench& F, const Vec4& v,
                     const GainSet& gains, double dt = kControlDt);

}  // namespace cogman
