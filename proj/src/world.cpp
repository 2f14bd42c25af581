#include "cogman/world.hpp"

#include <algorithm>
#include <cmath>

#include "cogman/errors.hpp"

namespace cogman {

namespace {

// Coulomb friction regularized to a viscous law below `eps`.
Vec2 friction_direction(const Vec2& v, double eps) {
  const double n = v.norm();
  if (n < eps) return v / eps;
  return v / n;
}

double friction_scale(double v, double eps) { return std::clamp(v / eps, -1.0, 1.0); }

bool finite(const Pose& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
         std::isfinite(p.rz);
}

}  // namespace

std::string_view to_string(ContactMode mode) {
  switch (mode) {
    case ContactMode::Free: return "free";
    case ContactMode::Surface: return "surface";
    case ContactMode::Wall: return "wall";
    case ContactMode::Bottom: return "bottom";
  }
  return "unknown";
}

void TaskGeometry::validate() const {
  if (!(hole_radius > peg_radius) || !(peg_radius > 0.0)) {
    throw ConfigError("task geometry needs hole_radius > peg_radius > 0");
  }
  if (!(hole_depth > 0.0) || hole_depth >= board_top) {
    throw ConfigError("task geometry needs 0 < hole_depth < board_top");
  }
  if ((feature_points[0] - feature_points[1]).norm() <= 0.0) {
    throw ConfigError("feature points must be distinct");
  }
}

void ContactParams::validate() const {
  if (!(k_n > 0 && c_n >= 0 && mu_peg >= 0 && mu_kinetic > 0 && board_mass > 0 &&
        slide_mobility > 0 && friction_velocity > 0)) {
    throw ConfigError("contact parameters must be positive");
  }
  if (mu_static < mu_kinetic) throw ConfigError("contact needs mu_static >= mu_kinetic");
}

Pose tip_pose(const Pose& ee_pose, const TaskGeometry& geom) {
  return compose(ee_pose, geom.tcp_offset);
}

Pose hole_pose(const Pose& board_pose, const TaskGeometry& geom) {
  Pose local = Pose::planar(geom.hole_center_in_board.x(), geom.hole_center_in_board.y(),
                            geom.board_top, 0.0);
  return compose(board_pose, local);
}

ContactResult classify_contact(const Pose& ee_pose, const Pose& board_pose,
                               const TaskGeometry& geom, const ContactParams& params,
                               const Vec4& ee_vel) {
  ContactResult out;
  const Pose tip = tip_pose(ee_pose, geom);
  const Pose hole = hole_pose(board_pose, geom);
  const Vec2 offset = tip.xy() - hole.xy();
  const double rho = offset.norm();
  const double depth = hole.z - tip.z;
  out.lateral_offset = rho;
  out.depth = depth;
  if (depth < 0.0) return out;

  const Vec2 v_xy{ee_vel[0], ee_vel[1]};
  const double v_z = ee_vel[2];
  const double eps = params.friction_velocity;
  const double lateral_pen = rho - geom.clearance();
  const bool over_surface = rho >= geom.hole_radius + geom.peg_radius;

  Vec2 f_xy = Vec2::Zero();
  double f_z = 0.0;

  if (lateral_pen > 0.0 && (over_surface || depth <= lateral_pen)) {
    // Resting on the top face: push up along the shallowest penetration.
    f_z = std::max(0.0, params.k_n * depth - params.c_n * v_z);
    f_xy = -params.mu_peg * f_z * friction_direction(v_xy, eps);
    out.mode = ContactMode::Surface;
  } else {
    if (lateral_pen > 0.0) {
      const Vec2 n = offset / rho;
      const double radial_rate = v_xy.dot(n);
      const double lateral = std::max(0.0, params.k_n * lateral_pen + params.c_n * radial_rate);
      f_xy = -lateral * n;
      f_z = -params.mu_peg * lateral * friction_scale(v_z, eps);
      out.mode = ContactMode::Wall;
    }
    if (depth >= geom.hole_depth) {
      f_z += std::max(0.0, params.k_n * (depth - geom.hole_depth) - params.c_n * v_z);
      out.mode = ContactMode::Bottom;
    }
  }
  out.wrench = Wrench{f_xy.x(), f_xy.y(), f_z, 0.0};
  return out;
}

World::World(WorldParams params) : params_(std::move(params)) {
  params_.geometry.validate();
  params_.contact.validate();
  if (params_.substeps < 1) throw ConfigError("world needs at least one substep");
  const ServoParams& s = params_.servo;
  for (int i = 0; i < 4; ++i) {
    if (!(s.stiffness[i] > 0 && s.mass[i] > 0)) throw ConfigError("servo gains must be positive");
    servo_damping_[i] = 2.0 * s.damping_ratio * std::sqrt(s.stiffness[i] * s.mass[i]);
  }
}

WorldState World::make_state(const Pose& ee, const Pose& board) const {
  WorldState s;
  s.ee_pose = ee;
  s.servo_ref = ee.task();
  s.board_pose = board;
  const ContactResult c = classify_contact(ee, board, params_.geometry, params_.contact);
  s.contact_mode = c.mode;
  s.contact_wrench = c.wrench;
  return s;
}

WorldState World::place_board(const WorkspaceSpec& ws, std::uint64_t seed) const {
  return make_state(ws.home, sample_uniform(ws, seed));
}

WorldState World::step(const WorldState& state, const Vec4& commanded_vel, double dt) const {
  if (!(dt > 0.0)) throw OutOfRange("world step needs dt > 0");
  if (!commanded_vel.allFinite()) throw NumericalError("non-finite velocity command");

  const TaskGeometry& geom = params_.geometry;
  const ContactParams& cp = params_.contact;
  const ServoParams& servo = params_.servo;
  const double h = dt / params_.substeps;
  const double board_weight = cp.board_mass * cp.gravity;

  WorldState s = state;
  s.board_load_ratio = 0.0;
  s.board_moved = false;

  for (int k = 0; k < params_.substeps; ++k) {
    s.servo_ref += commanded_vel * h;
    s.servo_ref[3] = wrap_angle(s.servo_ref[3]);

    const ContactResult contact = classify_contact(s.ee_pose, s.board_pose, geom, cp, s.ee_vel);
    const Vec4 fc = contact.wrench.vec();
    Vec4 x = s.ee_pose.task();
    Vec4 v_new;
    for (int i = 0; i < 4; ++i) {
      double err = s.servo_ref[i] - x[i];
      if (i == 3) err = wrap_angle(err);
      const double m = servo.mass[i];
      const double kp = servo.stiffness[i];
      const double kd = servo_damping_[i];
      v_new[i] = (m * s.ee_vel[i] + h * (kp * err + kd * commanded_vel[i] + fc[i])) /
                 (m + h * kd + h * h * kp);
    }
    x += h * v_new;
    s.ee_pose = Pose::from_task(x);
    s.ee_vel = v_new;

    if (contact.mode != ContactMode::Free) {
      // Reaction of the peg contact on the board.
      const Vec2 tangential{-fc[0], -fc[1]};
      const double normal = std::max(0.0, fc[2]);
      const double load = tangential.norm();
      const double threshold = cp.mu_static * (board_weight + normal);
      s.board_load_ratio = std::max(s.board_load_ratio, load / threshold);
      if (params_.board_movable && load > threshold) {
        const double speed = cp.slide_mobility * (load - cp.mu_kinetic * (board_weight + normal));
        const Vec2 step = tangential / load * speed * h;
        s.board_pose.x += step.x();
        s.board_pose.y += step.y();
        s.board_moved = true;
      }
    }
  }

  const ContactResult final_contact = classify_contact(s.ee_pose, s.board_pose, geom, cp, s.ee_vel);
  s.contact_mode = final_contact.mode;
  s.contact_wrench = final_contact.wrench;
  s.t = state.t + dt;

  if (!finite(s.ee_pose) || !s.ee_vel.allFinite() || !s.contact_wrench.finite() ||
      !finite(s.board_pose)) {
    throw NumericalError("world state diverged; check controller and servo gains");
  }
  return s;
}

}  // namespace cogman
