#include "cogman/controller.hpp"

#include <algorithm>
#include <cmath>

#include "cogman/errors.hpp"
#include "cogman/min_jerk.hpp"

namespace cogman {

GainSet::GainSet(const Vec4& k, const Vec4& m, const Vec4& b) : K(k), M(m), B(b) {
  if (!(K.minCoeff() > 0.0 && M.minCoeff() > 0.0 && B.minCoeff() > 0.0)) {
    throw ConfigError("gains must be strictly positive");
  }
  if (damping_ratio().minCoeff() < 0.7 - 1e-12) {
    throw ConfigError("damping ratio below 0.7; admittance loop would ring");
  }
}

GainSet GainSet::critically_damped(const Vec4& k, const Vec4& m, double zeta) {
  Vec4 b;
  for (int i = 0; i < 4; ++i) b[i] = 2.0 * zeta * std::sqrt(k[i] * m[i]);
  return GainSet(k, m, b);
}

Vec4 GainSet::damping_ratio() const {
  Vec4 r;
  for (int i = 0; i < 4; ++i) r[i] = B[i] / (2.0 * std::sqrt(K[i] * M[i]));
  return r;
}

Pose TrajectorySegment::at(double elapsed) const {
  const double tau = std::clamp(t + elapsed, 0.0, duration);
  if (duration <= 0.0) return goal;
  return min_jerk(start, goal, duration, tau);
}

Vec4 admittance_step(const ControlCommand& cmd, const Pose& X, const Wrench& F, const Vec4& v,
                     const GainSet& gains, double dt) {
  if (!(dt > 0.0)) throw OutOfRange("admittance step needs dt > 0");
  const Vec4 err = task_difference(cmd.X_d, X);
  const Vec4 f = F.vec() - cmd.F_d.vec();
  if (!err.allFinite() || !f.allFinite() || !v.allFinite()) {
    throw NumericalError("non-finite controller input");
  }
  Vec4 out;
  for (int i = 0; i < 4; ++i) {
    const double k = gains.K[i], m = gains.M[i], b = gains.B[i];
    out[i] = (m * v[i] + dt * (k * err[i] + f[i])) / (m + dt * b + dt * dt * k);
  }
  if (!out.allFinite()) throw NumericalError("controller produced a non-finite command");
  return out;
}

}  // namespace cogman
