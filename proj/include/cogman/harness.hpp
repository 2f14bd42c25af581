#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cogman/calibration_model.hpp"
#include "cogman/classroom.hpp"
#include "cogman/config.hpp"
#include "cogman/report.hpp"

namespace cogman {

struct EpisodeRecord {
  int index = 0;
  std::uint64_t seed = 0;
  Pose board;                          // true initial board pose
  std::optional<Pose> board_estimate;  // eye-to-hand estimate used for planning
  std::vector<std::string> stage_trace;  // stages in order of entry
  std::string fault;                   // empty unless the episode faulted
  int steps = 0;
  bool success = false;
  double max_force = 0.0;
  double board_displacement = 0.0;  // m, final minus initial board position
  double wall_time = 0.0;           // s, informational only
  // Enough of the final state to re-check the success guard from the log.
  Pose final_ee;
  Wrench final_wrench;
  std::optional<Pose> planned_goal;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> checkpoint;
  std::function<void(const std::string&)> log;
};

struct ScenarioResult {
  std::uint64_t config_hash = 0;
  Table summary;
  std::vector<std::string> jsonl;
  std::vector<EpisodeRecord> episodes;  // eval
  std::vector<CurveRow> curve;          // train
};

/// Runs the scenario in cfg.scenario. cfg must be finalized. Writes the
/// outputs under opts.out_dir when set.
ScenarioResult run_scenario(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Calibration used by evaluation episodes: collection, simulated manual
/// labels, auto labels and a refit on all labels.
CalibrationModel inline_calibration(const ExperimentConfig& cfg);

/// One semi-structured episode of the selected baseline. `agent` is required
/// for the residual-policy baselines.
EpisodeRecord run_eval_episode(const ExperimentConfig& cfg, const CalibrationModel& calib,
                               const SacAgent* agent, int index);

Table eval_summary(const ExperimentConfig& cfg, const std::vector<EpisodeRecord>& records);
std::string episode_json(const EpisodeRecord& r, std::uint64_t config_hash);

/// Re-evaluates the FineManip success guard on a logged final state.
bool replay_success(const SkillGraphSpec& spec, const EpisodeRecord& r);

struct StepStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for fewer than 2 values
};
StepStats step_stats(const std::vector<int>& steps);

}  // namespace cogman
