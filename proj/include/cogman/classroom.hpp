#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cogman/curriculum.hpp"
#include "cogman/executor.hpp"
#include "cogman/observation.hpp"
#include "cogman/planner.hpp"
#include "cogman/replay_buffer.hpp"
#include "cogman/reward.hpp"
#include "cogman/sac.hpp"
#include "cogman/vision.hpp"

namespace cogman {

/// Eye-in-hand sensing used by the residual policy.
struct EihSensor {
  CameraModel camera = CameraModel::eye_in_hand();
  DetectorNoise noise{0.25, 0.25, 0.0, 0.0};
  double hole_box_margin = 1.25;
};

/// Image part of the observation: the attention crop around the detected
/// hole, the full eye-in-hand frame, or nothing, depending on the mode. When
/// the hole is not detected the crop is blank.
Image policy_image(const WorldState& state, const TaskGeometry& geom, const EihSensor& sensor,
                   const ObservationSpec& spec, std::uint64_t texture_seed, std::uint64_t noise_seed);

/// Residual combination: X_d and K stay those of the base command, F_d is
/// the action (in [-1, 1]^4, goal frame) scaled by F_max and rotated into the
/// world frame by `frame_yaw`.
ControlCommand combine(const ControlCommand& base, const std::vector<double>& action,
                       const Wrench& F_max, double frame_yaw);

/// Zero base trajectory: hold the bottleneck with the contact-rich stiffness.
ControlCommand zero_base(const ControlCommand& base, const CoarsePolicy& plan);

/// Success test of the FineManip guard.
bool insertion_success(const SkillGraphSpec& spec, const CoarsePolicy& plan, const WorldState& s);

struct ClassroomConfig {
  WorldParams world;  // board fixed in the classroom
  SkillGraphSpec skill;
  Pose board = Pose::planar(0.175, 0.175, 0.0, 0.0);
  EihSensor sensor;
  ObservationSpec obs;
  RewardSpec reward;
  CurriculumState curriculum;
  SacConfig sac;
  int updates_per_episode = 200;
  bool zero_base = false;
  int parallel_envs = 1;  // > 1 rolls out that many episodes concurrently
  int eval_episodes = 20;
  Vec4 eval_E_r{0.002, 0.002, 0.002, 0.05};

  ClassroomConfig();
  void validate() const;
};

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double total_reward = 0.0;
  double max_force = 0.0;
  Vec4 injected_error = Vec4::Zero();  // planned minus true board pose
  Vec4 final_error = Vec4::Zero();     // EE minus true goal
  std::vector<Pose> trace;             // EE pose after every policy step
  // Filled when recording: observations (steps + 1), actions and rewards.
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> actions;
  std::vector<double> rewards;
};

/// One classroom episode starting at the (erroneous) bottleneck in FineManip.
/// Without an agent the residual is zero.
EpisodeResult run_classroom_episode(const ClassroomConfig& cfg, const Vec4& E_r,
                                    const SacAgent* agent, ActMode mode, std::uint64_t seed,
                                    bool record = false);

/// Appends a recorded episode to the buffer.
void store_episode(ReplayBuffer& buffer, const EpisodeResult& ep);

struct CurveRow {
  int episode = 0;
  double reward = 0.0;
  bool success = false;
  int steps = 0;
  double E_r = 0.0;  // translational range used in the episode, m
  double window_success = -1.0;  // set on episodes closing a curriculum window
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
};

struct TrainingResult {
  SacAgent agent;
  std::vector<CurveRow> curve;
  CurriculumState curriculum;
};

TrainingResult run_training(const ClassroomConfig& cfg, int episodes, std::uint64_t seed,
                            const std::function<void(const CurveRow&)>& on_episode = {});

/// Deterministic evaluation episodes at a fixed error range.
std::vector<EpisodeResult> evaluate_classroom(const ClassroomConfig& cfg, const SacAgent* agent,
                                              const Vec4& E_r, int episodes, std::uint64_t seed);

double success_rate(const std::vector<EpisodeResult>& eps);

}  // namespace cogman
