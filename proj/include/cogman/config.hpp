#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogman/classroom.hpp"
#include "cogman/geometry.hpp"
#include "cogman/vision.hpp"

namespace cogman {

enum class Scenario { Calibrate, DetectEval, TrainResidual, EvalSemiStructured };
enum class Baseline {
  DirectPose_B1,
  TeachSearch_B2,
  PureRL_B3,
  ResidualForce_B4,
  ResidualRawVision_B5,
  Ours,
};

std::string_view to_string(Scenario s);
std::string_view to_string(Baseline b);
Baseline parse_baseline(std::string_view name);  // throws ConfigError

/// Observation mode and base-trajectory variant each policy baseline uses.
ObsMode obs_mode_for(Baseline b);
bool uses_residual_policy(Baseline b);

struct CalibrationSettings {
  int placements = 24;  // m board placements
  int offsets = 16;     // n bottleneck offsets per placement
  std::vector<int> manual_counts{8, 10};
  double label_sigma_px = 0.5;
  bool render_images = true;
  bool write_dataset = true;
};

struct DetectSettings {
  bool dump_images = true;
};

struct EvalSettings {
  Vec4 E_r{0.006, 0.006, 0.002, 0.05};  // about 3x the eye-to-hand localization std
  bool board_movable = true;
  // Residual-policy baselines plan with the checkpoint's final training range.
  bool E_r_from_checkpoint = true;
  int calib_placements = 8;
  int calib_offsets = 2;
  int calib_manual = 8;
  double b1_overshoot = 0.005;  // m below the goal
  double b2_pitch = 0.0003;     // m per turn
  double b2_feed = 0.002;       // m/s along the spiral
  double b2_press = 6.0;        // N pressed down while searching
  double b2_contact_fz = 2.0;   // N, contact detection threshold
};

struct ExperimentConfig {
  Scenario scenario = Scenario::EvalSemiStructured;
  Baseline baseline = Baseline::Ours;
  std::uint64_t seed = 1;
  int trials = 16;
  int train_episodes = 300;
  WorkspaceSpec workspace;
  CameraModel eth_camera = CameraModel::eye_to_hand();
  // 1 px at 500 px/m puts the board localization std near 2 mm.
  DetectorNoise eth_noise{1.0, 1.0, 0.0, 0.0};
  ClassroomConfig classroom;
  CalibrationSettings calib;
  DetectSettings detect;
  EvalSettings eval;

  /// Re-derives dependent fields (OEC model from the geometry, sizes) and
  /// checks every section. Throws ConfigError.
  void finalize();
  void validate() const;

  /// Sorted `key = value` lines of every field; the hash input.
  std::string canonical() const;
  std::uint64_t hash() const;
};

struct ConfigField {
  std::string key;
  std::string doc;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

/// Every configurable key, in documentation order.
const std::vector<ConfigField>& config_fields();

/// Applies `key = value` lines (`#` starts a comment) on top of `base`.
/// Unknown keys, malformed lines and bad values raise ConfigError with the
/// line number.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
void set_field(ExperimentConfig& cfg, std::string_view key, const std::string& value);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace cogman
