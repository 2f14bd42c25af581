#include "cogman/vision.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cogman/errors.hpp"

namespace cogman {

namespace {

constexpr float kBoardShade = 0.80f;
constexpr float kHoleShade = 0.08f;
constexpr float kFeatureShade = 0.25f;
constexpr float kArmShade = 0.35f;
constexpr float kPegShade = 0.95f;
constexpr double kTextureCell = 0.008;  // m

std::uint64_t hash3(std::int64_t a, std::int64_t b, std::uint64_t seed) {
  std::uint64_t h = derive_seed(seed, static_cast<std::uint64_t>(a) * 0x9E3779B1ULL);
  return derive_seed(h, static_cast<std::uint64_t>(b));
}

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  return static_cast<double>(hash3(ix, iy, seed) >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Two-octave value noise over world x/y; stands in for a cluttered table.
float background(const Vec2& p, std::uint64_t seed) {
  double value = 0.0;
  double amp = 0.6;
  double cell = kTextureCell;
  for (int octave = 0; octave < 2; ++octave) {
    const double gx = p.x() / cell;
    const double gy = p.y() / cell;
    const double fx = std::floor(gx);
    const double fy = std::floor(gy);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = smooth(gx - fx);
    const double ty = smooth(gy - fy);
    const std::uint64_t s = seed + static_cast<std::uint64_t>(octave);
    const double top = lattice(ix, iy, s) * (1 - tx) + lattice(ix + 1, iy, s) * tx;
    const double bot = lattice(ix, iy + 1, s) * (1 - tx) + lattice(ix + 1, iy + 1, s) * tx;
    value += amp * (top * (1 - ty) + bot * ty);
    amp *= 0.5;
    cell *= 0.4;
  }
  return static_cast<float>(0.2 + 0.45 * value / 0.9);
}

struct BoardFrame {
  Pose inv;
  Vec2 half;
  Vec2 hole;
  double hole_r2;
  std::array<Vec2, 2> features;
  double feature_r2;

  BoardFrame(const Pose& board, const TaskGeometry& g)
      : inv(inverse(board)),
        half(g.board_half_extents),
        hole(g.hole_center_in_board),
        hole_r2(g.hole_radius * g.hole_radius),
        features(g.feature_points),
        feature_r2(g.feature_radius * g.feature_radius) {}

  // Shade of the board top at world x/y, or nothing when off the board.
  std::optional<float> shade(const Vec2& world) const {
    const Vec2 local = rotate(world, inv.rz) + Vec2{inv.x, inv.y};
    if (std::abs(local.x()) > half.x() || std::abs(local.y()) > half.y()) return std::nullopt;
    if ((local - hole).squaredNorm() <= hole_r2) return kHoleShade;
    for (const Vec2& f : features) {
      if ((local - f).squaredNorm() <= feature_r2) return kFeatureShade;
    }
    return kBoardShade;
  }
};

Pose eye_in_hand_pose(const CameraModel& cam, const Pose& ee_pose) {
  return compose(ee_pose, cam.mount_pose);
}

Image render_impl(const WorldState& state, const CameraModel& cam, const TaskGeometry& geom,
                  const Scene& scene, bool parallel) {
  cam.validate();
  Image img(cam.width, cam.height);
  const BoardFrame board(state.board_pose, geom);
  const double top_z = state.board_pose.z + geom.board_top;
  const Pose eih = eye_in_hand_pose(cam, state.ee_pose);
  const Pose tip = tip_pose(state.ee_pose, geom);
  const double f = cam.focal();
  const double occ_r2 = cam.occluder_radius * cam.occluder_radius;
  const Vec2 ee_xy = state.ee_pose.xy();
  constexpr double kOffsets[2] = {0.25, 0.75};

  auto sample = [&](double su, double sv) -> float {
    const Vec2 rel{su - cam.principal_point.x(), sv - cam.principal_point.y()};
    if (cam.kind == CameraKind::EyeToHand) {
      const Vec2 world = cam.mount_pose.xy() + rotate(rel / cam.scale, cam.mount_pose.rz);
      if ((world - ee_xy).squaredNorm() <= occ_r2) return kArmShade;
      if (scene.board_present) {
        if (auto s = board.shade(world)) return *s;
      }
      return background(world, scene.texture_seed);
    }
    const Vec2 ray = rel / f;
    float value;
    const double d_top = eih.z - top_z;
    const Vec2 on_top = eih.xy() + rotate(ray * d_top, eih.rz);
    std::optional<float> s;
    if (scene.board_present && d_top > 0.0) s = board.shade(on_top);
    if (s) {
      value = *s;
    } else {
      const double d_table = eih.z - state.board_pose.z;
      value = background(eih.xy() + rotate(ray * d_table, eih.rz), scene.texture_seed);
    }
    // Peg footprint, drawn translucent so the hole beneath stays visible.
    const double d_tip = eih.z - tip.z;
    const Vec2 tip_rel = rotate(tip.xy() - eih.xy(), -eih.rz);
    if (d_tip > 0.0 && (ray * d_tip - tip_rel).squaredNorm() <= geom.peg_radius * geom.peg_radius) {
      value = 0.5f * value + 0.5f * kPegShade;
    }
    return value;
  };

#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      float acc = 0.0f;
      for (double oy : kOffsets) {
        for (double ox : kOffsets) acc += sample(x + ox, y + oy);
      }
      img.at(x, y) = 0.25f * acc;
    }
  }
  return img;
}

bool in_image(const CameraModel& cam, const Vec2& px) {
  return px.x() >= 0.0 && px.y() >= 0.0 && px.x() < cam.width && px.y() < cam.height;
}

void clamp_box(Detection& d, const CameraModel& cam) {
  const double x0 = std::clamp(d.cx - 0.5 * d.w, 0.0, static_cast<double>(cam.width));
  const double x1 = std::clamp(d.cx + 0.5 * d.w, 0.0, static_cast<double>(cam.width));
  const double y0 = std::clamp(d.cy - 0.5 * d.h, 0.0, static_cast<double>(cam.height));
  const double y1 = std::clamp(d.cy + 0.5 * d.h, 0.0, static_cast<double>(cam.height));
  d.cx = 0.5 * (x0 + x1);
  d.cy = 0.5 * (y0 + y1);
  d.w = x1 - x0;
  d.h = y1 - y0;
}

bool occluded(const WorldState& state, const CameraModel& cam, const TaskGeometry& geom,
              ObjectClass cls) {
  if (cam.kind != CameraKind::EyeToHand) return false;
  const Vec2 ee = state.ee_pose.xy();
  if (cls == ObjectClass::Board) {
    const Pose local = compose(inverse(state.board_pose), state.ee_pose);
    return std::abs(local.x) <= geom.board_half_extents.x() &&
           std::abs(local.y) <= geom.board_half_extents.y();
  }
  const int idx = cls == ObjectClass::Feature1 ? 0 : 1;
  const Vec2 f = compose(state.board_pose, Pose::planar(geom.feature_points[idx].x(),
                                                        geom.feature_points[idx].y(), 0.0, 0.0))
                     .xy();
  return (f - ee).norm() < cam.occluder_radius + geom.feature_radius;
}

}  // namespace

CameraModel CameraModel::eye_to_hand() {
  CameraModel cam;
  cam.kind = CameraKind::EyeToHand;
  cam.mount_pose = Pose::planar(0.175, 0.175, 1.0, 0.03);
  cam.scale = 500.0;
  cam.width = cam.height = 256;
  cam.principal_point = {128.0, 128.0};
  return cam;
}

CameraModel CameraModel::eye_in_hand() {
  CameraModel cam;
  cam.kind = CameraKind::EyeInHand;
  cam.mount_pose = Pose{};
  cam.scale = 3000.0;
  cam.width = cam.height = 64;
  cam.principal_point = {32.0, 32.0};
  cam.reference_depth = 0.11;
  cam.occluder_radius = 0.0;
  return cam;
}

void CameraModel::validate() const {
  if (!(scale > 0.0) || width <= 0 || height <= 0 || !(reference_depth > 0.0)) {
    throw ConfigError("camera needs positive scale, size and reference depth");
  }
}

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Board: return "board";
    case ObjectClass::Feature1: return "feature1";
    case ObjectClass::Feature2: return "feature2";
    case ObjectClass::Hole: return "hole";
  }
  return "unknown";
}

void DetectorNoise::validate() const {
  if (!(sigma_center >= 0.0 && sigma_size >= 0.0)) throw ConfigError("detector sigma must be >= 0");
  if (!(occlusion_conf_floor >= 0.0 && occlusion_conf_floor <= 1.0) ||
      !(dropout_prob >= 0.0 && dropout_prob <= 1.0)) {
    throw ConfigError("detector probabilities must lie in [0, 1]");
  }
}

Vec2 project(const CameraModel& cam, const Pose& ee_pose, const Vec3& point) {
  if (cam.kind == CameraKind::EyeToHand) {
    const Vec2 rel = rotate(point.head<2>() - cam.mount_pose.xy(), -cam.mount_pose.rz);
    return cam.principal_point + cam.scale * rel;
  }
  const Pose c = eye_in_hand_pose(cam, ee_pose);
  const double depth = c.z - point.z();
  if (!(depth > 0.0)) throw OutOfRange("point is not below the eye-in-hand camera");
  const Vec2 rel = rotate(point.head<2>() - c.xy(), -c.rz);
  return cam.principal_point + cam.focal() * rel / depth;
}

Vec4 hole_corner_offsets(const WorldState& state, const CameraModel& cam,
                         const TaskGeometry& geom, double margin) {
  const Pose hole = hole_pose(state.board_pose, geom);
  const Pose c = eye_in_hand_pose(cam, state.ee_pose);
  const Vec2 center = project(cam, state.ee_pose, Vec3{hole.x, hole.y, hole.z}) - cam.principal_point;
  const double half = cam.focal() * geom.hole_radius * margin / (c.z - hole.z);
  return {center.x() - half, center.y() - half, center.x() + half, center.y() + half};
}

std::vector<Detection> oracle_boxes(const WorldState& state, const CameraModel& cam,
                                    const TaskGeometry& geom, const Scene& scene) {
  std::vector<Detection> out;
  if (!scene.board_present) return out;
  const Pose& b = state.board_pose;
  if (cam.kind == CameraKind::EyeToHand) {
    const double top = b.z + geom.board_top;
    Detection board{ObjectClass::Board, 0, 0, 0, 0, 1.0};
    Vec2 lo = Vec2::Constant(1e300), hi = Vec2::Constant(-1e300);
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        const Pose corner = compose(b, Pose::planar(sx * geom.board_half_extents.x(),
                                                    sy * geom.board_half_extents.y(), 0, 0));
        const Vec2 px = project(cam, state.ee_pose, Vec3{corner.x, corner.y, top});
        lo = lo.cwiseMin(px);
        hi = hi.cwiseMax(px);
      }
    }
    const Vec2 c = project(cam, state.ee_pose, Vec3{b.x, b.y, top});
    board.cx = c.x();
    board.cy = c.y();
    board.w = hi.x() - lo.x();
    board.h = hi.y() - lo.y();
    out.push_back(board);
    const double side = 2.0 * geom.feature_radius * cam.scale;
    for (int i = 0; i < 2; ++i) {
      const Pose f = compose(b, Pose::planar(geom.feature_points[i].x(), geom.feature_points[i].y(), 0, 0));
      const Vec2 px = project(cam, state.ee_pose, Vec3{f.x, f.y, top});
      out.push_back({i == 0 ? ObjectClass::Feature1 : ObjectClass::Feature2, px.x(), px.y(), side,
                     side, 1.0});
    }
    return out;
  }
  const Pose c = eye_in_hand_pose(cam, state.ee_pose);
  const Pose hole = hole_pose(b, geom);
  if (c.z - hole.z <= 0.0) return out;
  const Vec4 corners = hole_corner_offsets(state, cam, geom, scene.hole_box_margin);
  const Vec2 pp = cam.principal_point;
  out.push_back({ObjectClass::Hole, pp.x() + 0.5 * (corners[0] + corners[2]),
                 pp.y() + 0.5 * (corners[1] + corners[3]), corners[2] - corners[0],
                 corners[3] - corners[1], 1.0});
  return out;
}

Image render(const WorldState& state, const CameraModel& cam, const TaskGeometry& geom,
             const Scene& scene) {
  return render_impl(state, cam, geom, scene, true);
}

Image render_serial(const WorldState& state, const CameraModel& cam, const TaskGeometry& geom,
                    const Scene& scene) {
  return render_impl(state, cam, geom, scene, false);
}

std::vector<Detection> detect(const WorldState& state, const CameraModel& cam,
                              const TaskGeometry& geom, const DetectorNoise& noise,
                              std::uint64_t seed, const Scene& scene) {
  noise.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Detection> out;
  for (Detection d : oracle_boxes(state, cam, geom, scene)) {
    // Every object consumes the same number of draws so streams stay aligned.
    const double drop = uniform01(rng);
    const double n[4] = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    if (!in_image(cam, d.center()) || drop < noise.dropout_prob) continue;
    d.cx += noise.sigma_center * n[0];
    d.cy += noise.sigma_center * n[1];
    d.w = std::max(1.0, d.w + noise.sigma_size * n[2]);
    d.h = std::max(1.0, d.h + noise.sigma_size * n[3]);
    clamp_box(d, cam);
    if (occluded(state, cam, geom, d.cls)) d.confidence = noise.occlusion_conf_floor;
    out.push_back(d);
  }
  return out;
}

std::optional<Detection> find(const std::vector<Detection>& dets, ObjectClass cls) {
  for (const Detection& d : dets) {
    if (d.cls == cls) return d;
  }
  return std::nullopt;
}

Pose estimate_board_pose(const std::vector<Detection>& dets, const CalibrationModel& calib,
                         const WorkspaceSpec& ws, double min_confidence) {
  if (!calib.has_eye_to_hand) throw MissingCalibration("eye-to-hand calibration not fitted");
  std::array<Vec2, 3> p;
  const ObjectClass order[3] = {ObjectClass::Board, ObjectClass::Feature1, ObjectClass::Feature2};
  for (int i = 0; i < 3; ++i) {
    const auto d = find(dets, order[i]);
    if (!d) throw MissingDetection(std::string(to_string(order[i])));
    if (d->confidence < min_confidence) {
      throw LowConfidence(std::string(to_string(order[i])) + " confidence below threshold");
    }
    p[i] = calib.pixel_to_robot(d->center());
  }
  Pose out;
  out.x = p[0].x();
  out.y = p[0].y();
  out.z = ws.z_con;
  out.rx = ws.rx_con;
  out.ry = ws.ry_con;
  out.rz = wrap_angle(std::atan2(p[2].y() - p[1].y(), p[2].x() - p[1].x()));
  return out;
}

namespace {

// Overlap weights of output cells [lo + i*step, lo + (i+1)*step) with unit
// source cells, per axis.
struct AxisWeights {
  std::vector<int> first;
  std::vector<std::vector<double>> w;
};

AxisWeights axis_weights(double lo, double hi, int out_n) {
  AxisWeights a;
  const double step = (hi - lo) / out_n;
  for (int i = 0; i < out_n; ++i) {
    const double c0 = lo + i * step;
    const double c1 = c0 + step;
    const int s0 = static_cast<int>(std::floor(c0));
    const int s1 = static_cast<int>(std::ceil(c1));
    a.first.push_back(s0);
    std::vector<double> w;
    for (int s = s0; s < s1; ++s) {
      w.push_back(std::max(0.0, std::min<double>(c1, s + 1) - std::max<double>(c0, s)));
    }
    a.w.push_back(std::move(w));
  }
  return a;
}

}  // namespace

Image crop_attention(const Image& img, const Detection& det, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw OutOfRange("crop output size must be positive");
  if (det.w < 2.0 || det.h < 2.0) throw DegenerateBox("detection box smaller than 2 px");
  const double x0 = std::clamp(det.cx - 0.5 * det.w, 0.0, static_cast<double>(img.width));
  const double x1 = std::clamp(det.cx + 0.5 * det.w, 0.0, static_cast<double>(img.width));
  const double y0 = std::clamp(det.cy - 0.5 * det.h, 0.0, static_cast<double>(img.height));
  const double y1 = std::clamp(det.cy + 0.5 * det.h, 0.0, static_cast<double>(img.height));
  if (x1 - x0 < 2.0 || y1 - y0 < 2.0) throw DegenerateBox("clamped box smaller than 2 px");

  const AxisWeights ax = axis_weights(x0, x1, out_w);
  const AxisWeights ay = axis_weights(y0, y1, out_h);
  Image out(out_w, out_h);
  for (int j = 0; j < out_h; ++j) {
    for (int i = 0; i < out_w; ++i) {
      double acc = 0.0;
      double total = 0.0;
      for (std::size_t b = 0; b < ay.w[j].size(); ++b) {
        const int sy = std::min(ay.first[j] + static_cast<int>(b), img.height - 1);
        for (std::size_t a = 0; a < ax.w[i].size(); ++a) {
          const int sx = std::min(ax.first[i] + static_cast<int>(a), img.width - 1);
          const double w = ay.w[j][b] * ax.w[i][a];
          acc += w * img.at(sx, sy);
          total += w;
        }
      }
      out.at(i, j) = static_cast<float>(acc / total);
    }
  }
  return out;
}

CalibrationModel ideal_eye_to_hand_calibration(const CameraModel& cam) {
  if (cam.kind != CameraKind::EyeToHand) throw ConfigError("ideal calibration needs an eye-to-hand camera");
  CalibrationModel m;
  const double c = std::cos(cam.mount_pose.rz);
  const double s = std::sin(cam.mount_pose.rz);
  Eigen::Matrix2d r_inv;
  r_inv << c, s, -s, c;
  const Vec2 mount = cam.mount_pose.xy();
  m.A.leftCols<2>() = cam.scale * r_inv;
  m.A.col(2) = cam.principal_point - cam.scale * r_inv * mount;
  const Eigen::Matrix2d r = r_inv.transpose();
  m.Binv.leftCols<2>() = r / cam.scale;
  m.Binv.col(2) = mount - r * cam.principal_point / cam.scale;
  m.has_eye_to_hand = true;
  return m;
}

}  // namespace cogman
