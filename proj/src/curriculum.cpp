#include "cogman/curriculum.hpp"

#include <algorithm>

#include "cogman/errors.hpp"

namespace cogman {

void CurriculumState::validate() const {
  if (!(epsilon >= 0.0) || window <= 0 || !(alpha <= beta) || min_range < 0.0) {
    throw ConfigError("curriculum needs epsilon >= 0, window > 0, alpha <= beta, min_range >= 0");
  }
  if (E_r0.minCoeff() < 0.0) throw ConfigError("curriculum base range must be >= 0");
}

CurriculumState curriculum_update(const CurriculumState& state, const std::vector<bool>& recent) {
  if (static_cast<int>(recent.size()) < state.window) {
    throw OutOfRange("curriculum update needs a full window of episodes");
  }
  const auto first = recent.end() - state.window;
  const auto wins = std::count(first, recent.end(), true);
  CurriculumState next = state;
  next.s_r = static_cast<double>(wins) / state.window;
  double delta = 0.0;
  if (next.s_r > state.beta) {
    delta = state.epsilon;
  } else if (next.s_r < state.alpha) {
    delta = -state.epsilon;
  }
  for (int i = 0; i < 4; ++i) {
    if (state.mask[i] == 0.0) continue;
    next.E_r[i] = std::max(state.min_range, state.E_r[i] + delta);
  }
  return next;
}

}  // namespace cogman
