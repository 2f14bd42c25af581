#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "cogman/geometry.hpp"

namespace cogman {

enum class ContactMode { Free, Surface, Wall, Bottom };

std::string_view to_string(ContactMode mode);

/// Peg, hole and board dimensions. Board-frame quantities are relative to the
/// board origin, which sits on the table at the board's geometric center.
struct TaskGeometry {
  double peg_radius = 0.005;
  double hole_radius = 0.0055;
  double hole_depth = 0.020;
  Vec2 hole_center_in_board{0.02, 0.0};
  Vec2 board_half_extents{0.06, 0.04};
  double board_top = 0.03;  // top surface height above the board origin
  std::array<Vec2, 2> feature_points{Vec2{-0.04, -0.025}, Vec2{0.04, -0.025}};
  double feature_radius = 0.006;
  Pose tcp_offset = Pose::planar(0.0, 0.0, -0.1, 0.0);  // flange -> peg tip

  double clearance() const { return hole_radius - peg_radius; }
  void validate() const;
};

/// Penalty contact and board/table friction. Board mass and friction are free
/// parameters; the defaults are documented in docs/config.md.
struct ContactParams {
  double k_n = 1.0e5;
  double c_n = 100.0;
  double mu_peg = 0.15;
  double mu_static = 0.4;
  double mu_kinetic = 0.3;
  double board_mass = 0.5;
  double slide_mobility = 0.01;      // (m/s)/N of excess tangential load
  double friction_velocity = 1e-3;   // m/s regularization of Coulomb friction
  double gravity = 9.81;

  void validate() const;
};

/// Low-level position servo the robot uses to follow velocity commands. The
/// servo integrates the command into a reference and pulls the end-effector
/// body toward it; contact forces act on the body directly.
struct ServoParams {
  Vec4 stiffness{2.0e4, 2.0e4, 2.0e4, 200.0};
  Vec4 mass{1.0, 1.0, 1.0, 0.01};
  double damping_ratio = 1.0;
};

struct WorldParams {
  TaskGeometry geometry;
  ContactParams contact;
  ServoParams servo;
  int substeps = 4;
  bool board_movable = true;
};

struct WorldState {
  Pose ee_pose;
  Vec4 ee_vel = Vec4::Zero();
  Vec4 servo_ref = Vec4::Zero();  // integrated velocity command (x, y, z, rz)
  Pose board_pose;
  Wrench contact_wrench;  // on the end-effector, world frame
  ContactMode contact_mode = ContactMode::Free;
  double t = 0.0;
  // Largest tangential-load / static-threshold ratio seen on the board during
  // the last step, and whether the board moved in that step.
  double board_load_ratio = 0.0;
  bool board_moved = false;
};

struct ContactResult {
  ContactMode mode = ContactMode::Free;
  Wrench wrench;
  double lateral_offset = 0.0;  // rho: tip axis distance from hole axis
  double depth = 0.0;           // tip depth below the board top (negative above)
};

/// Peg-tip contact against the board. `ee_vel` only feeds damping and the
/// regularized friction terms; at zero velocity only elastic forces remain.
ContactResult classify_contact(const Pose& ee_pose, const Pose& board_pose,
                               const TaskGeometry& geom, const ContactParams& params,
                               const Vec4& ee_vel = Vec4::Zero());

Pose tip_pose(const Pose& ee_pose, const TaskGeometry& geom);
Pose hole_pose(const Pose& board_pose, const TaskGeometry& geom);

class World {
 public:
  explicit World(WorldParams params = {});

  const WorldParams& params() const { return params_; }
  const TaskGeometry& geometry() const { return params_.geometry; }

  /// Advances one controller tick with `substeps` physics substeps.
  /// Throws NumericalError if the state stops being finite.
  WorldState step(const WorldState& state, const Vec4& commanded_vel, double dt) const;

  /// Board at sample_uniform(ws, seed); end-effector at rest at home.
  WorldState place_board(const WorkspaceSpec& ws, std::uint64_t seed) const;

  /// End-effector at rest at `ee`, board at `board`.
  WorldState make_state(const Pose& ee, const Pose& board) const;

 private:
  WorldParams params_;
  Vec4 servo_damping_;
};

}  // namespace cogman
