#include "cogman/reward.hpp"

#include "cogman/errors.hpp"

namespace cogman {

void RewardSpec::validate() const {
  if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0) throw ConfigError("reward weights must be >= 0");
  if (!(W.minCoeff() > 0.0) || !(F_max.vec().cwiseAbs().minCoeff() > 0.0)) {
    throw ConfigError("reward normalizers must be positive");
  }
}

double reward(const Pose& X, const Pose& goal, const Wrench& F, bool success, const RewardSpec& spec) {
  const Vec4 guide = task_difference(X, goal).cwiseQuotient(spec.W);
  const Vec4 force = F.vec().cwiseQuotient(spec.F_max.vec().cwiseAbs());
  double r = -spec.lambda1 * guide.norm() - spec.lambda2 * force.norm();
  if (success) r += spec.lambda3 * spec.R_succ;
  return r;
}

}  // namespace cogman
