#include "cogman/observation.hpp"

#include <algorithm>

#include "cogman/errors.hpp"

namespace cogman {

std::string_view to_string(ObsMode m) {
  switch (m) {
    case ObsMode::Attention: return "attention";
    case ObsMode::ProprioOnly: return "proprio";
    case ObsMode::FullImage: return "full_image";
  }
  return "unknown";
}

int ObservationSpec::image_dim() const {
  switch (mode) {
    case ObsMode::Attention: return crop * crop;
    case ObsMode::ProprioOnly: return 0;
    case ObsMode::FullImage: return image_side * image_side;
  }
  return 0;
}

void ObservationSpec::validate() const {
  if (crop < 2 || image_side < 2 || history < 0 || !(clamp > 0.0)) {
    throw ConfigError("observation needs crop, image side >= 2, history >= 0, clamp > 0");
  }
}

namespace {

Vec4 clamp_vec(const Vec4& v, double c) { return v.cwiseMax(-c).cwiseMin(c); }

}  // namespace

Vec4 normalized_pose(const Pose& X, const Pose& goal, const Vec4& W, double clamp) {
  const Vec4 d = task_difference(X, goal);
  const Vec2 local = rotate(d.head<2>(), -goal.rz);
  const Vec4 r{local.x(), local.y(), d[2], d[3]};
  return clamp_vec(r.cwiseQuotient(W), clamp);
}

Vec4 normalized_wrench(const Wrench& F, const Pose& goal, const Wrench& F_max, double clamp) {
  const Vec2 local = rotate(Vec2{F.fx, F.fy}, -goal.rz);
  const Vec4 f{local.x(), local.y(), F.fz, F.tz};
  return clamp_vec(f.cwiseQuotient(F_max.vec().cwiseAbs()), clamp);
}

ObservationBuilder::ObservationBuilder(ObservationSpec spec) : spec_(spec) { spec_.validate(); }

std::vector<double> ObservationBuilder::build(const Image& image, const Vec4& rp, const Vec4& f) {
  const int img = spec_.image_dim();
  if (img > 0 && static_cast<int>(image.size()) != img) {
    throw OutOfRange("observation image has the wrong size");
  }
  const std::size_t frames = static_cast<std::size_t>(spec_.history) + 1;
  if (history_.empty()) {
    for (std::size_t i = 0; i < frames; ++i) {
      history_.push_back(rp);
      history_.push_back(f);
    }
  } else {
    history_.push_front(f);
    history_.push_front(rp);
    history_.resize(2 * frames);
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spec_.dim()));
  for (int i = 0; i < img; ++i) {
    out.push_back(std::clamp(static_cast<double>(image.pixels[static_cast<std::size_t>(i)]),
                             -spec_.clamp, spec_.clamp));
  }
  for (const Vec4& v : history_) {
    const Vec4 c = clamp_vec(v, spec_.clamp);
    out.insert(out.end(), c.data(), c.data() + 4);
  }
  return out;
}

}  // namespace cogman
