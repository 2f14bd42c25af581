#pragma once

#include <vector>

#include "cogman/geometry.hpp"

namespace cogman {

struct CurriculumState {
  Vec4 E_r0{0.002, 0.002, 0.002, 0.05};
  Vec4 E_r{0.002, 0.002, 0.002, 0.05};
  double epsilon = 0.0005;
  double alpha = 0.5;  // lower edge of the target success band
  double beta = 0.7;   // upper edge
  int window = 10;
  // Components the curriculum adjusts (translational by default).
  Vec4 mask{1.0, 1.0, 1.0, 0.0};
  double min_range = 0.0;
  double s_r = 0.0;  // success rate of the last full window

  void validate() const;
};

/// Eq.-style adaptive range: grows by epsilon above the band, shrinks below
/// it, clamped at min_range. Throws OutOfRange unless a full window is given.
CurriculumState curriculum_update(const CurriculumState& state, const std::vector<bool>& recent);

}  // namespace cogman
