#pragma once

#include "cogman/geometry.hpp"

namespace cogman {

struct RewardSpec {
  double lambda1 = 1.0;  // guidance
  double lambda2 = 0.8;  // contact force
  double lambda3 = 1.0;  // success
  double R_succ = 100.0;
  Vec4 W{0.002, 0.002, 0.032, 0.05};
  Wrench F_max{10.0, 10.0, 10.0, 0.1};

  void validate() const;
};

/// r = -l1 |W^-1 (X - goal)| - l2 |F_max^-1 F| + l3 R_succ [success]
double reward(const Pose& X, const Pose& goal, const Wrench& F, bool success, const RewardSpec& spec);

}  // namespace cogman
