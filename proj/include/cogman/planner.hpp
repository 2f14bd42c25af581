#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogman/controller.hpp"
#include "cogman/geometry.hpp"
#include "cogman/min_jerk.hpp"
#include "cogman/world.hpp"

namespace cogman {

/// Key end-effector poses expressed in the board (master object) frame.
struct OecModel {
  Pose bottleneck;  // pre-insertion pose, board frame
  Pose goal;        // inserted pose, board frame
  Pose home;        // world frame

  /// Bottleneck `approach_height` above the board top with the peg tip on the
  /// hole axis; goal with the tip at the hole bottom.
  static OecModel from_geometry(const TaskGeometry& geom, const Pose& home,
                                double approach_height = 0.01);
  void validate(const WorkspaceSpec& ws) const;
};

/// Retargets a demonstration: OEC pose = inverse(board) ∘ EE pose at each
/// keyframe. Home is the EE pose of the first frame.
OecModel record_demo(const std::vector<WorldState>& demo, std::size_t bottleneck_frame,
                     std::size_t goal_frame);

struct CoarsePolicy {
  Pose start;
  Pose bottleneck;
  Pose goal;
  double T_cf = 3.0;
  double T_cr = 6.0;
  Vec4 K_cf = Vec4::Zero();
  Vec4 K_cr = Vec4::Zero();
  Vec4 W = Vec4::Zero();
  Vec4 E_r = Vec4::Zero();
  Wrench F_max;

  TrajectorySegment contact_free(double t) const { return {start, bottleneck, T_cf, t}; }
  TrajectorySegment contact_rich(double t) const { return {bottleneck, goal, T_cr, t}; }
};

/// Bottleneck and goal = board_est ∘ OEC poses; W = E_r + |bottleneck - goal|;
/// K_cr = F_max / W. Throws ZeroExplorationSpace when a W component is 0.
CoarsePolicy plan_coarse(const OecModel& oec, const Pose& board_est, const Vec4& E_r,
                         const Wrench& F_max, double T_cf, double T_cr, const Vec4& K_cf);

enum class Stage { GlobalPerceive, Plan, CoarseMove, FineManip, Done, Fault };
std::string_view to_string(Stage s);

struct SkillGraphSpec {
  OecModel oec;
  WorkspaceSpec workspace;
  Vec4 E_r{0.002, 0.002, 0.002, 0.05};
  Wrench F_max{10.0, 10.0, 10.0, 0.1};
  double T_cf = 3.0;
  double T_cr = 6.0;
  Vec4 K_cf{2000.0, 2000.0, 2000.0, 20.0};
  // c3 tolerance around the bottleneck; c4 tolerance around the goal.
  Vec4 e_th_bottleneck{0.001, 0.001, 0.001, 0.02};
  Vec4 e_th_goal{0.02, 0.02, 0.001, kPi};
  double F_z_succ = 5.0;
  int perceive_timeout = 5;
  int coarse_timeout = 40;
  int episode_cap = 120;  // policy steps over the whole episode

  void validate() const;
};

/// Board estimate handed to the state machine by the perception pipeline.
struct Perception {
  std::optional<Pose> board_estimate;
  std::string failure;  // non-empty when perception raised
};

struct Fault {
  Stage stage = Stage::GlobalPerceive;
  std::string reason;
};

/// Per-episode state of the skill graph.
struct SkillContext {
  Stage stage = Stage::GlobalPerceive;
  int steps = 0;          // policy steps taken in the episode
  int stage_steps = 0;    // policy steps taken in the current stage
  double stage_t0 = 0.0;  // episode time when the stage started
  std::optional<Pose> board_estimate;
  std::optional<CoarsePolicy> plan;
  std::optional<Fault> fault;
};

struct SkillStep {
  Stage next = Stage::GlobalPerceive;
  ControlCommand cmd;
  bool residual_enabled = false;
  std::optional<Fault> fault;
};

bool within(const Vec4& diff, const Vec4& tol);

/// One policy tick of the skill graph. Evaluates the guard of the current
/// stage on `world`, performs at most one transition, and returns the command
/// of the resulting stage. `ctx` is advanced in place.
SkillStep skill_step(const SkillGraphSpec& spec, SkillContext& ctx, const WorldState& world,
                     const Perception& perception, double t);

/// Context for an episode that starts directly in FineManip at the bottleneck.
SkillContext fine_manip_context(const CoarsePolicy& plan, double t = 0.0);

}  // namespace cogman
