#pragma once

#include <deque>
#include <string_view>
#include <vector>

#include "cogman/geometry.hpp"
#include "cogman/image.hpp"

namespace cogman {

enum class ObsMode {
  Attention,    // 16x16 hole crop + proprioception
  ProprioOnly,  // (R_p, F) history only
  FullImage,    // whole eye-in-hand image + proprioception
};
std::string_view to_string(ObsMode m);

struct ObservationSpec {
  ObsMode mode = ObsMode::Attention;
  int crop = 16;        // attention side, px
  int image_side = 64;  // eye-in-hand image side for FullImage
  int history = 3;      // previous (R_p, F) frames kept besides the current one
  double clamp = 1.5;

  int image_dim() const;
  int proprio_dim() const { return 8 * (history + 1); }
  int dim() const { return image_dim() + proprio_dim(); }
  void validate() const;
};

/// Goal-relative pose in the goal frame, divided by W and clamped.
Vec4 normalized_pose(const Pose& X, const Pose& goal, const Vec4& W, double clamp);

/// Contact wrench rotated into the goal frame, divided by F_max and clamped.
Vec4 normalized_wrench(const Wrench& F, const Pose& goal, const Wrench& F_max, double clamp);

/// Assembles observation vectors: [image | current (R_p, F) | history...].
/// The history is seeded with the first frame after reset().
class ObservationBuilder {
 public:
  explicit ObservationBuilder(ObservationSpec spec = {});

  const ObservationSpec& spec() const { return spec_; }
  void reset() { history_.clear(); }

  /// `image` must be crop x crop (Attention), image_side^2 (FullImage) or is
  /// ignored (ProprioOnly). Throws OutOfRange on a size mismatch.
  std::vector<double> build(const Image& image, const Vec4& rp, const Vec4& f);

 private:
  ObservationSpec spec_;
  std::deque<Vec4> history_;  // alternating rp, f; newest first
};

}  // namespace cogman
