#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cogman/calibration_model.hpp"
#include "cogman/image.hpp"
#include "cogman/planner.hpp"
#include "cogman/vision.hpp"
#include "cogman/world.hpp"

namespace cogman {

struct EthRecord {
  Image image;         // empty when rendering is disabled
  Vec2 position;       // board placement P = (x, y), robot frame
  double yaw = 0.0;    // board placement yaw
  WorldState state;    // scene the image was taken in
  std::uint64_t texture_seed = 0;
};

struct EihRecord {
  Image image;
  Vec3 offset = Vec3::Zero();  // achieved EE offset from the bottleneck, task frame
  WorldState state;
  std::uint64_t texture_seed = 0;
};

struct SampleSet {
  std::vector<EthRecord> eth;
  std::vector<EihRecord> eih;
  int m = 0;
  int n = 0;
  int pruned_offsets = 0;  // sampled offsets rejected for colliding with the board
  CameraModel eth_camera;
  CameraModel eih_camera;
  TaskGeometry geometry;
  double hole_box_margin = 1.25;
  std::uint64_t seed = 0;
};

struct CollectConfig {
  WorldParams world;
  CameraModel eth_camera = CameraModel::eye_to_hand();
  CameraModel eih_camera = CameraModel::eye_in_hand();
  Vec3 offset_range{0.002, 0.002, 0.002};  // EE offsets sampled in ±range, z >= 0 kept
  double approach_height = 0.01;
  double hole_box_margin = 1.25;
  double move_time = 1.0;    // s between offsets
  double settle_time = 0.25;
  bool render_images = true;
};

/// Embodied collection: m board placements, n bottleneck offsets each, driven
/// through the controller and world. Deterministic per seed.
SampleSet collect_samples(const WorkspaceSpec& ws, const TaskGeometry& geom, int m, int n,
                          std::uint64_t seed, const CollectConfig& cfg = {});

struct EthFit {
  Mat23 A;
  Mat23 Binv;
  Vec2 std_fwd;  // px
  Vec2 std_inv;  // m
  double pooled_fwd = 0.0;
  double pooled_inv = 0.0;
};

/// Pairs of (robot x, y) and (pixel u, v). Needs >= 4 non-collinear pairs.
EthFit fit_eth(const std::vector<std::pair<Vec2, Vec2>>& pairs);

struct JacobianFit {
  Mat4 C;
  Vec4 std;  // px
  double pooled = 0.0;
};

/// Pairs of (dx, dy, dz) and (left u, left v, right u, right v).
JacobianFit fit_image_jacobian(const std::vector<std::pair<Vec3, Vec4>>& pairs);

enum class LabelSource { Manual, Auto };
std::string_view to_string(LabelSource s);

struct LabelRecord {
  std::size_t image_id = 0;
  CameraKind camera = CameraKind::EyeToHand;
  ObjectClass cls = ObjectClass::Board;
  double cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;  // normalized to [0, 1]
  LabelSource source = LabelSource::Manual;
};

/// Records chosen for manual annotation: `count` indices spread evenly.
std::vector<std::size_t> manual_indices(std::size_t total, std::size_t count);

/// Simulated manual annotation of both cameras on `count` evenly spaced
/// records: oracle boxes with N(0, sigma) px added to center and size.
std::vector<LabelRecord> manual_labels(const SampleSet& set, std::size_t count, double sigma_px,
                                       std::uint64_t seed);

/// Fits the eye-to-hand maps and the eye-in-hand Jacobian on manual labels.
CalibrationModel calibrate_from_labels(const SampleSet& set, const std::vector<LabelRecord>& labels);

/// Labels every record without a manual label. Throws MissingCalibration when
/// the model or the manual labels lack either camera.
std::vector<LabelRecord> auto_label(const SampleSet& set, const std::vector<LabelRecord>& manual,
                                    const CalibrationModel& calib);

struct QualityRow {
  CameraKind camera = CameraKind::EyeToHand;
  LabelSource source = LabelSource::Manual;
  std::size_t count = 0;
  double center_std_px = 0.0;
  double size_std_px = 0.0;
  double center_std_m = 0.0;
};

/// Residual std of label centers and sizes against the oracle, one row per
/// (camera, source) pair present in `labels`.
std::vector<QualityRow> label_quality_report(const SampleSet& set,
                                             const std::vector<LabelRecord>& labels);

/// One row of the calibration table for a given manual subset size.
struct CalibrationRow {
  std::size_t manual = 0;
  std::size_t total = 0;
  double eth_manual_std_px = 0.0;  // forward map fitted on manual labels
  double eth_all_std_px = 0.0;     // refit on manual + auto labels
  double jac_manual_std_px = 0.0;
  double jac_all_std_px = 0.0;
  double inv_std_m = 0.0;          // pixel -> robot map
  double eth_manual_std_m = 0.0;
  double eth_all_std_m = 0.0;
  double auto_center_err_px = 0.0;  // auto label centers vs oracle, RMS
  double manual_fraction = 0.0;
  int pruned_offsets = 0;
};

CalibrationRow evaluate_calibration(const SampleSet& set, std::size_t manual, double sigma_px,
                                    std::uint64_t seed);

/// Writes <dir>/images/<camera>_<id>.pgm (when rendered), one label file per
/// image under <dir>/labels and the dataset manifest <dir>/manifest.csv.
void write_dataset(const std::filesystem::path& dir, const SampleSet& set,
                   const std::vector<LabelRecord>& labels);

std::string label_line(const LabelRecord& r);

}  // namespace cogman
