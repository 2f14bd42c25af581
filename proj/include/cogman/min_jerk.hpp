#pragma once

#include "cogman/geometry.hpp"

namespace cogman {

/// s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5 on [0, 1].
double min_jerk_profile(double tau);

/// Pose at time t of a min-jerk move from start to goal lasting T seconds.
/// Yaw interpolates along the wrapped difference. Throws OutOfRange unless
/// 0 <= t <= T.
Pose min_jerk(const Pose& start, const Pose& goal, double T, double t);

}  // namespace cogman
