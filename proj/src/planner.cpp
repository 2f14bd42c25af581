#include "cogman/planner.hpp"

#include <cmath>

#include "cogman/errors.hpp"

namespace cogman {

double min_jerk_profile(double tau) {
  const double t3 = tau * tau * tau;
  return t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

Pose min_jerk(const Pose& start, const Pose& goal, double T, double t) {
  if (!(T > 0.0) || t < 0.0 || t > T) throw OutOfRange("min_jerk needs 0 <= t <= T and T > 0");
  const double s = min_jerk_profile(t / T);
  const Vec4 d = task_difference(goal, start);
  return Pose::from_task(start.task() + s * d);
}

OecModel OecModel::from_geometry(const TaskGeometry& geom, const Pose& home,
                                 double approach_height) {
  const Vec2 h = geom.hole_center_in_board;
  const double tcp = geom.tcp_offset.z;
  OecModel m;
  m.bottleneck = Pose::planar(h.x(), h.y(), geom.board_top + approach_height - tcp, 0.0);
  m.goal = Pose::planar(h.x(), h.y(), geom.board_top - geom.hole_depth - tcp, 0.0);
  m.home = home;
  return m;
}

void OecModel::validate(const WorkspaceSpec& ws) const {
  if (!(bottleneck.z > goal.z)) throw ConfigError("bottleneck must lie above the goal");
  if (ws.x_range.contains(home.x) && ws.y_range.contains(home.y)) {
    throw ConfigError("home must lie outside the workspace x/y region");
  }
}

OecModel record_demo(const std::vector<WorldState>& demo, std::size_t bottleneck_frame,
                     std::size_t goal_frame) {
  if (demo.empty() || bottleneck_frame >= demo.size() || goal_frame >= demo.size()) {
    throw OutOfRange("demonstration keyframe outside the recorded sequence");
  }
  auto retarget = [&](std::size_t i) {
    return compose(inverse(demo[i].board_pose), demo[i].ee_pose);
  };
  OecModel m;
  m.bottleneck = retarget(bottleneck_frame);
  m.goal = retarget(goal_frame);
  m.home = demo.front().ee_pose;
  return m;
}

CoarsePolicy plan_coarse(const OecModel& oec, const Pose& board_est, const Vec4& E_r,
                         const Wrench& F_max, double T_cf, double T_cr, const Vec4& K_cf) {
  CoarsePolicy p;
  p.start = oec.home;
  p.bottleneck = compose(board_est, oec.bottleneck);
  p.goal = compose(board_est, oec.goal);
  p.T_cf = T_cf;
  p.T_cr = T_cr;
  p.K_cf = K_cf;
  p.E_r = E_r;
  p.F_max = F_max;
  p.W = E_r + task_difference(p.bottleneck, p.goal).cwiseAbs();
  const Vec4 fmax = F_max.vec().cwiseAbs();
  for (int i = 0; i < 4; ++i) {
    if (!(p.W[i] > 0.0)) throw ZeroExplorationSpace("exploration space has a zero component");
    p.K_cr[i] = fmax[i] / p.W[i];
  }
  return p;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::GlobalPerceive: return "GlobalPerceive";
    case Stage::Plan: return "Plan";
    case Stage::CoarseMove: return "CoarseMove";
    case Stage::FineManip: return "FineManip";
    case Stage::Done: return "Done";
    case Stage::Fault: return "Fault";
  }
  return "Unknown";
}

void SkillGraphSpec::validate() const {
  oec.validate(workspace);
  if (!(e_th_bottleneck.minCoeff() > 0.0 && e_th_goal.minCoeff() > 0.0)) {
    throw ConfigError("transition tolerances must be positive");
  }
  if (!(F_z_succ > 0.0) || F_z_succ > std::abs(F_max.fz)) {
    throw ConfigError("success force must lie in (0, F_max.fz]");
  }
  if (!(T_cf > 0.0 && T_cr > 0.0) || episode_cap <= 0) {
    throw ConfigError("durations and episode cap must be positive");
  }
}

bool within(const Vec4& diff, const Vec4& tol) {
  return (diff.cwiseAbs().array() <= tol.array()).all();
}

namespace {

ControlCommand hold(const Pose& p, const Vec4& K) {
  ControlCommand c;
  c.X_d = p;
  c.K = K;
  return c;
}

ControlCommand track(const TrajectorySegment& seg, const Vec4& K) {
  ControlCommand c;
  c.segment = seg;
  c.X_d = seg.at(0.0);
  c.K = K;
  return c;
}

void enter(SkillContext& ctx, Stage s, double t) {
  ctx.stage = s;
  ctx.stage_steps = 0;
  ctx.stage_t0 = t;
}

}  // namespace

SkillStep skill_step(const SkillGraphSpec& spec, SkillContext& ctx, const WorldState& world,
                     const Perception& perception, double t) {
  SkillStep out;
  const Pose& X = world.ee_pose;

  auto fail = [&](std::string reason) {
    ctx.fault = Fault{ctx.stage, std::move(reason)};
    out.fault = ctx.fault;
    enter(ctx, Stage::Fault, t);
    out.next = Stage::Fault;
    out.cmd = hold(X, spec.K_cf);
    return out;
  };

  if (ctx.stage == Stage::Done || ctx.stage == Stage::Fault) {
    out.next = ctx.stage;
    out.fault = ctx.fault;
    out.cmd = hold(X, spec.K_cf);
    return out;
  }

  // Guards of the current stage; at most one transition per tick.
  switch (ctx.stage) {
    case Stage::GlobalPerceive:
      if (perception.board_estimate && spec.workspace.contains(*perception.board_estimate)) {
        ctx.board_estimate = perception.board_estimate;
        enter(ctx, Stage::Plan, t);
      } else if (ctx.stage_steps >= spec.perceive_timeout) {
        return fail(perception.failure.empty() ? "board not found" : perception.failure);
      }
      break;
    case Stage::Plan:
      ctx.plan = plan_coarse(spec.oec, *ctx.board_estimate, spec.E_r, spec.F_max, spec.T_cf,
                             spec.T_cr, spec.K_cf);
      ctx.plan->start = X;
      enter(ctx, Stage::CoarseMove, t);
      break;
    case Stage::CoarseMove:
      if (within(task_difference(X, ctx.plan->bottleneck), spec.e_th_bottleneck)) {
        enter(ctx, Stage::FineManip, t);
      } else if (ctx.stage_steps >= spec.coarse_timeout) {
        return fail("timeout");
      }
      break;
    case Stage::FineManip:
      if (within(task_difference(X, ctx.plan->goal), spec.e_th_goal) &&
          world.contact_wrench.fz >= spec.F_z_succ) {
        enter(ctx, Stage::Done, t);
        out.next = Stage::Done;
        out.cmd = hold(X, ctx.plan->K_cr);
        return out;
      }
      break;
    default:
      break;
  }

  if (ctx.steps >= spec.episode_cap) return fail("timeout");

  out.next = ctx.stage;
  switch (ctx.stage) {
    case Stage::GlobalPerceive:
    case Stage::Plan:
      out.cmd = hold(spec.oec.home, spec.K_cf);
      break;
    case Stage::CoarseMove:
      out.cmd = track(ctx.plan->contact_free(t - ctx.stage_t0), spec.K_cf);
      break;
    case Stage::FineManip:
      out.cmd = track(ctx.plan->contact_rich(t - ctx.stage_t0), ctx.plan->K_cr);
      out.residual_enabled = true;
      break;
    default:
      break;
  }
  ++ctx.steps;
  ++ctx.stage_steps;
  return out;
}

SkillContext fine_manip_context(const CoarsePolicy& plan, double t) {
  SkillContext ctx;
  ctx.stage = Stage::FineManip;
  ctx.stage_t0 = t;
  ctx.plan = plan;
  return ctx;
}

}  // namespace cogman
