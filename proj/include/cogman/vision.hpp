#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cogman/calibration_model.hpp"
#include "cogman/geometry.hpp"
#include "cogman/image.hpp"
#include "cogman/world.hpp"

namespace cogman {

enum class CameraKind { EyeToHand, EyeInHand };

/// EyeToHand: orthographic top view, pixel = pp + scale * R(-yaw) (p - mount).
/// EyeInHand: pinhole looking straight down from the flange; `scale` is the
/// px/m magnification at `reference_depth` below the camera.
struct CameraModel {
  CameraKind kind = CameraKind::EyeToHand;
  Pose mount_pose;
  double scale = 500.0;
  int width = 256;
  int height = 256;
  Vec2 principal_point{128.0, 128.0};
  double reference_depth = 0.11;
  // Eye-to-hand only: the arm body seen from above, centered on the EE.
  double occluder_radius = 0.035;

  static CameraModel eye_to_hand();
  static CameraModel eye_in_hand();
  double focal() const { return scale * reference_depth; }
  void validate() const;
};

enum class ObjectClass { Board = 0, Feature1 = 1, Feature2 = 2, Hole = 3 };
std::string_view to_string(ObjectClass c);

struct Detection {
  ObjectClass cls = ObjectClass::Board;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 0.0;

  Vec2 center() const { return {cx, cy}; }
};

struct DetectorNoise {
  double sigma_center = 0.0;  // px
  double sigma_size = 0.0;    // px
  double occlusion_conf_floor = 0.0;
  double dropout_prob = 0.0;

  void validate() const;
};

struct Scene {
  bool board_present = true;
  std::uint64_t texture_seed = 0;
  // Hole detection box side as a multiple of the hole diameter.
  double hole_box_margin = 1.25;
};

/// Ground-truth projection of a world point (x, y at height z).
Vec2 project(const CameraModel& cam, const Pose& ee_pose, const Vec3& point);

/// Noise-free boxes for every object the camera should report, ignoring
/// occlusion. This is also the labelling oracle.
std::vector<Detection> oracle_boxes(const WorldState& state, const CameraModel& cam,
                                    const TaskGeometry& geom, const Scene& scene = {});

/// Eye-in-hand hole box corners (left-top, right-bottom) relative to the
/// principal point, noise free.
Vec4 hole_corner_offsets(const WorldState& state, const CameraModel& cam,
                         const TaskGeometry& geom, double margin);

Image render(const WorldState& state, const CameraModel& cam, const TaskGeometry& geom,
             const Scene& scene = {});
/// Single-threaded reference; bit-identical to render().
Image render_serial(const WorldState& state, const CameraModel& cam, const TaskGeometry& geom,
                    const Scene& scene = {});

std::vector<Detection> detect(const WorldState& state, const CameraModel& cam,
                              const TaskGeometry& geom, const DetectorNoise& noise,
                              std::uint64_t seed, const Scene& scene = {});

/// Returns the first detection of `cls`, if any.
std::optional<Detection> find(const std::vector<Detection>& dets, ObjectClass cls);

Pose estimate_board_pose(const std::vector<Detection>& dets, const CalibrationModel& calib,
                         const WorkspaceSpec& ws, double min_confidence = 0.5);

Image crop_attention(const Image& img, const Detection& det, int out_w, int out_h);

/// Exact eye-to-hand maps of a camera; useful as a noise-free calibration.
CalibrationModel ideal_eye_to_hand_calibration(const CameraModel& cam);

}  // namespace cogman
