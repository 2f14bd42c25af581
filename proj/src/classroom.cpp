#include "cogman/classroom.hpp"

#include <cmath>

#include "cogman/errors.hpp"
#include "cogman/parallel.hpp"

namespace cogman {

Image policy_image(const WorldState& state, const TaskGeometry& geom, const EihSensor& sensor,
                   const ObservationSpec& spec, std::uint64_t texture_seed, std::uint64_t noise_seed) {
  if (spec.mode == ObsMode::ProprioOnly) return {};
  Scene scene;
  scene.texture_seed = texture_seed;
  scene.hole_box_margin = sensor.hole_box_margin;
  Image frame = render(state, sensor.camera, geom, scene);
  if (spec.mode == ObsMode::FullImage) {
    if (frame.width != spec.image_side || frame.height != spec.image_side) {
      throw ConfigError("eye-in-hand image size differs from obs.image_side");
    }
    return frame;
  }
  const auto dets = detect(state, sensor.camera, geom, sensor.noise, noise_seed, scene);
  const auto hole = find(dets, ObjectClass::Hole);
  if (!hole) return Image(spec.crop, spec.crop, 0.0f);
  try {
    return crop_attention(frame, *hole, spec.crop, spec.crop);
  } catch (const DegenerateBox&) {
    return Image(spec.crop, spec.crop, 0.0f);
  }
}

ControlCommand combine(const ControlCommand& base, const std::vector<double>& action,
                       const Wrench& F_max, double frame_yaw) {
  ControlCommand c = base;
  if (action.empty()) return c;
  const Vec2 xy = rotate(Vec2{action[0] * std::abs(F_max.fx), action[1] * std::abs(F_max.fy)},
                         frame_yaw);
  c.F_d = clamp(Wrench{xy.x(), xy.y(), action[2] * std::abs(F_max.fz), action[3] * std::abs(F_max.tz)},
                F_max);
  return c;
}

ControlCommand zero_base(const ControlCommand& base, const CoarsePolicy& plan) {
  ControlCommand c = base;
  c.segment.reset();
  c.X_d = plan.bottleneck;
  return c;
}

bool insertion_success(const SkillGraphSpec& spec, const CoarsePolicy& plan, const WorldState& s) {
  return within(task_difference(s.ee_pose, plan.goal), spec.e_th_goal) &&
         s.contact_wrench.fz >= spec.F_z_succ;
}

ClassroomConfig::ClassroomConfig() {
  world.board_movable = false;
  skill.oec = OecModel::from_geometry(world.geometry, skill.workspace.home);
  curriculum.E_r0 = skill.E_r;
  curriculum.E_r = skill.E_r;
  curriculum.min_range = 0.0005;
  reward.F_max = skill.F_max;
  obs.crop = 16;
  obs.image_side = sensor.camera.width;
  eval_E_r = skill.E_r;
}

void ClassroomConfig::validate() const {
  world.geometry.validate();
  world.contact.validate();
  skill.validate();
  sensor.camera.validate();
  sensor.noise.validate();
  obs.validate();
  reward.validate();
  curriculum.validate();
  sac.validate();
  if (updates_per_episode < 0 || parallel_envs < 1 || eval_episodes < 0) {
    throw ConfigError("updates, parallel envs and evaluation episodes must be non-negative");
  }
  if (!(curriculum.min_range > 0.0)) {
    throw ConfigError("training needs a positive minimum error range (W must stay positive)");
  }
}

EpisodeResult run_classroom_episode(const ClassroomConfig& cfg, const Vec4& E_r,
                                    const SacAgent* agent, ActMode mode, std::uint64_t seed,
                                    bool record) {
  const World world(cfg.world);
  const TaskGeometry& geom = world.geometry();
  std::mt19937_64 err_rng(derive_seed(seed, 1));
  std::mt19937_64 act_rng(derive_seed(seed, 2));
  const std::uint64_t texture = derive_seed(seed, 3);

  EpisodeResult res;
  // Error injected into the planned trajectory: the plan believes the board
  // sits at board + e, with e uniform in +-E_r on x, y and yaw.
  const Vec4 e{E_r[0] * (2.0 * uniform01(err_rng) - 1.0), E_r[1] * (2.0 * uniform01(err_rng) - 1.0),
               0.0, E_r[3] * (2.0 * uniform01(err_rng) - 1.0)};
  res.injected_error = e;
  const Pose believed = Pose::planar(cfg.board.x + e[0], cfg.board.y + e[1], cfg.board.z,
                                     wrap_angle(cfg.board.rz + e[3]));
  const CoarsePolicy plan = plan_coarse(cfg.skill.oec, believed, E_r, cfg.skill.F_max,
                                        cfg.skill.T_cf, cfg.skill.T_cr, cfg.skill.K_cf);
  const Pose true_goal = compose(cfg.board, cfg.skill.oec.goal);
  RewardSpec rspec = cfg.reward;
  rspec.W = plan.W;

  WorldState state = world.make_state(plan.bottleneck, cfg.board);
  Vec4 v = Vec4::Zero();
  SkillContext ctx = fine_manip_context(plan);
  ObservationBuilder builder(cfg.obs);
  double t = 0.0;

  auto observe = [&](int step) {
    const Image img = policy_image(state, geom, cfg.sensor, cfg.obs, texture,
                                   derive_seed(seed, 1000 + static_cast<std::uint64_t>(step)));
    return builder.build(img, normalized_pose(state.ee_pose, plan.goal, plan.W, cfg.obs.clamp),
                         normalized_wrench(state.contact_wrench, plan.goal, cfg.skill.F_max,
                                           cfg.obs.clamp));
  };

  std::vector<double> obs = observe(0);
  if (record) res.observations.push_back(obs);
  const std::vector<double> no_action(4, 0.0);
  while (true) {
    const SkillStep step = skill_step(cfg.skill, ctx, state, Perception{}, t);
    if (step.next != Stage::FineManip) {
      res.success = step.next == Stage::Done;
      break;
    }
    const std::vector<double> action = agent ? agent->act(obs, mode, act_rng) : no_action;
    ControlCommand cmd = cfg.zero_base ? zero_base(step.cmd, plan) : step.cmd;
    cmd = combine(cmd, action, cfg.skill.F_max, plan.goal.rz);
    const TickSummary tick = execute(world, state, v, cmd);
    state = tick.state;
    v = tick.v;
    t += kPolicyDt;
    res.max_force = std::max(res.max_force, tick.max_force);
    res.trace.push_back(state.ee_pose);

    const bool success = insertion_success(cfg.skill, plan, state);
    const double r = reward(state.ee_pose, true_goal, state.contact_wrench, success, rspec);
    res.total_reward += r;
    res.steps = ctx.steps;
    obs = observe(ctx.steps);
    if (record) {
      res.actions.push_back(action);
      res.rewards.push_back(r);
      res.observations.push_back(obs);
    }
    if (success) {
      res.success = true;
      break;
    }
  }
  res.final_error = task_difference(state.ee_pose, true_goal);
  return res;
}

void store_episode(ReplayBuffer& buffer, const EpisodeResult& ep) {
  if (ep.actions.empty()) return;
  buffer.begin_episode(ep.observations.front());
  const std::size_t n = ep.actions.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Episodes only end on success or at the step cap; the cap is a time
    // limit, so only success cuts the bootstrap.
    const bool last = i + 1 == n;
    buffer.append(ep.actions[i], ep.rewards[i], ep.observations[i + 1], last, last && ep.success);
  }
}

TrainingResult run_training(const ClassroomConfig& cfg, int episodes, std::uint64_t seed,
                            const std::function<void(const CurveRow&)>& on_episode) {
  cfg.validate();
  if (episodes < 0) throw OutOfRange("episode count must be non-negative");
  TrainingResult out{SacAgent(cfg.obs.dim(), 4, cfg.sac, derive_seed(seed, 1)), {}, cfg.curriculum};
  ReplayBuffer buffer(cfg.obs.dim(), 4, cfg.sac.replay_capacity);
  std::mt19937_64 update_rng(derive_seed(seed, 2));
  std::vector<bool> window;

  int ep = 0;
  while (ep < episodes) {
    const int k = std::min(cfg.parallel_envs, episodes - ep);
    const Vec4 E_r = out.curriculum.E_r;
    std::vector<EpisodeResult> batch(static_cast<std::size_t>(k));
    const SacAgent& agent = out.agent;
    ExceptionSlot errors;
#pragma omp parallel for schedule(static, 1) if (k > 1)
    for (int i = 0; i < k; ++i) {
      errors.guard([&] {
        batch[static_cast<std::size_t>(i)] = run_classroom_episode(
            cfg, E_r, &agent, ActMode::Stochastic,
            derive_seed(seed, 1000000 + static_cast<std::uint64_t>(ep + i)), true);
      });
    }
    errors.rethrow();
    for (int i = 0; i < k; ++i, ++ep) {
      const EpisodeResult& r = batch[static_cast<std::size_t>(i)];
      store_episode(buffer, r);
      CurveRow row;
      row.episode = ep;
      row.reward = r.total_reward;
      row.success = r.success;
      row.steps = r.steps;
      row.E_r = E_r[0];
      if (buffer.size() >= static_cast<std::size_t>(cfg.sac.batch)) {
        UpdateDiagnostics acc;
        for (int u = 0; u < cfg.updates_per_episode; ++u) {
          const UpdateDiagnostics d = out.agent.update(buffer, update_rng);
          acc.critic_loss += d.critic_loss / cfg.updates_per_episode;
          acc.actor_loss += d.actor_loss / cfg.updates_per_episode;
          acc.alpha = d.alpha;
        }
        row.critic_loss = acc.critic_loss;
        row.actor_loss = acc.actor_loss;
        row.alpha = acc.alpha;
      } else {
        row.alpha = out.agent.alpha();
      }
      window.push_back(r.success);
      if (static_cast<int>(window.size()) == out.curriculum.window) {
        out.curriculum = curriculum_update(out.curriculum, window);
        row.window_success = out.curriculum.s_r;
        window.clear();
      }
      out.curve.push_back(row);
      if (on_episode) on_episode(row);
    }
  }
  return out;
}

std::vector<EpisodeResult> evaluate_classroom(const ClassroomConfig& cfg, const SacAgent* agent,
                                              const Vec4& E_r, int episodes, std::uint64_t seed) {
  std::vector<EpisodeResult> out(static_cast<std::size_t>(std::max(episodes, 0)));
  ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < episodes; ++i) {
    errors.guard([&] {
      out[static_cast<std::size_t>(i)] = run_classroom_episode(
          cfg, E_r, agent, ActMode::Deterministic,
          derive_seed(seed, 2000000 + static_cast<std::uint64_t>(i)));
    });
  }
  errors.rethrow();
  return out;
}

double success_rate(const std::vector<EpisodeResult>& eps) {
  if (eps.empty()) return 0.0;
  int s = 0;
  for (const auto& e : eps) s += e.success ? 1 : 0;
  return static_cast<double>(s) / static_cast<double>(eps.size());
}

}  // namespace cogman
