#include "cogman/harness.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "json.hpp"

#include "cogman/baselines.hpp"
#include "cogman/calibration.hpp"
#include "cogman/checkpoint.hpp"
#include "cogman/errors.hpp"
#include "cogman/executor.hpp"
#include "cogman/parallel.hpp"

namespace cogman {

using nlohmann::json;

namespace {

void say(const RunOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

json pose_json(const Pose& p) { return json::array({p.x, p.y, p.z, p.rz}); }

std::vector<std::string> common_comments(const ExperimentConfig& cfg) {
  return {"config_hash=" + hex64(cfg.hash()), "scenario=" + std::string(to_string(cfg.scenario)),
          "baseline=" + std::string(to_string(cfg.baseline)), "seed=" + std::to_string(cfg.seed)};
}

std::string baseline_note(Baseline b) {
  switch (b) {
    case Baseline::DirectPose_B1:
      return "direct_pose_b1: one eye-to-hand estimate then stiff open-loop descent below the goal";
    case Baseline::TeachSearch_B2:
      return "teach_search_b2: nominal pose from the eye-to-hand estimate then an outward "
             "spiral gated on contact force";
    case Baseline::PureRL_B3:
      return "pure_rl_b3: residual policy on top of a held bottleneck (no base trajectory)";
    case Baseline::ResidualForce_B4:
      return "residual_force_b4: residual policy observing pose and wrench history only";
    case Baseline::ResidualRawVision_B5:
      return "residual_raw_vision_b5: residual policy observing the full eye-in-hand image";
    case Baseline::Ours:
      return "ours: residual policy observing the hole attention crop, pose and wrench";
  }
  return "";
}

CollectConfig collect_config(const ExperimentConfig& cfg, bool render) {
  CollectConfig cc;
  cc.world = cfg.classroom.world;
  cc.eth_camera = cfg.eth_camera;
  cc.eih_camera = cfg.classroom.sensor.camera;
  cc.hole_box_margin = cfg.classroom.sensor.hole_box_margin;
  cc.render_images = render;
  return cc;
}

// ----------------------------------------------------------------------------
// calibrate

ScenarioResult run_calibrate(const ExperimentConfig& cfg, const RunOptions& opts) {
  ScenarioResult res;
  res.config_hash = cfg.hash();
  const TaskGeometry& geom = cfg.classroom.world.geometry;
  say(opts, "collecting " + std::to_string(cfg.calib.placements * cfg.calib.offsets) + " samples");
  const SampleSet set = collect_samples(cfg.workspace, geom, cfg.calib.placements, cfg.calib.offsets,
                                        derive_seed(cfg.seed, 1),
                                        collect_config(cfg, cfg.calib.render_images));

  Table& t = res.summary;
  t.comments = common_comments(cfg);
  t.comments.push_back("std columns: residual std of the fitted maps; eth in px, inv in m");
  t.header = {"manual",          "total",           "manual_fraction", "eth_manual_std_px",
              "eth_all_std_px",  "jac_manual_std_px", "jac_all_std_px", "inv_std_m",
              "auto_center_err_px", "pruned_offsets"};
  for (int count : cfg.calib.manual_counts) {
    const CalibrationRow r = evaluate_calibration(set, static_cast<std::size_t>(count),
                                                  cfg.calib.label_sigma_px, derive_seed(cfg.seed, 2));
    t.rows.push_back({std::to_string(r.manual), std::to_string(r.total), fmt_num(r.manual_fraction),
                      fmt_num(r.eth_manual_std_px), fmt_num(r.eth_all_std_px),
                      fmt_num(r.jac_manual_std_px), fmt_num(r.jac_all_std_px), fmt_num(r.inv_std_m),
                      fmt_num(r.auto_center_err_px), std::to_string(r.pruned_offsets)});
  }

  // Dataset: labels of the first manual count plus auto labels for the rest.
  const std::size_t count = static_cast<std::size_t>(cfg.calib.manual_counts.front());
  const auto manual = manual_labels(set, count, cfg.calib.label_sigma_px, derive_seed(cfg.seed, 2));
  const CalibrationModel calib = calibrate_from_labels(set, manual);
  std::vector<LabelRecord> labels = manual;
  const auto autos = auto_label(set, manual, calib);
  labels.insert(labels.end(), autos.begin(), autos.end());

  std::map<std::size_t, std::string> source;
  for (const auto& l : labels) source[l.image_id] = std::string(to_string(l.source));
  for (std::size_t i = 0; i < set.eih.size(); ++i) {
    json j;
    j["config_hash"] = hex64(res.config_hash);
    j["image_id"] = i;
    j["board"] = json::array({set.eth[i].position.x(), set.eth[i].position.y(), set.eth[i].yaw});
    j["offset"] = json::array({set.eih[i].offset.x(), set.eih[i].offset.y(), set.eih[i].offset.z()});
    j["label_source"] = source[i];
    res.jsonl.push_back(j.dump());
  }
  if (opts.out_dir) {
    if (cfg.calib.write_dataset) write_dataset(*opts.out_dir / "dataset", set, labels);
    Table q;
    q.comments = common_comments(cfg);
    q.header = {"camera", "source", "count", "center_std_px", "size_std_px", "center_std_m"};
    for (const QualityRow& r : label_quality_report(set, labels)) {
      q.rows.push_back({r.camera == CameraKind::EyeToHand ? "eye_to_hand" : "eye_in_hand",
                        std::string(to_string(r.source)), std::to_string(r.count),
                        fmt_num(r.center_std_px), fmt_num(r.size_std_px), fmt_num(r.center_std_m)});
    }
    write_table(*opts.out_dir / "label_quality.csv", q);
  }
  return res;
}

// ----------------------------------------------------------------------------
// detect-eval

std::string det_label(const Detection& d, const CameraModel& cam) {
  LabelRecord l;
  l.cls = d.cls;
  l.cx = d.cx / cam.width;
  l.cy = d.cy / cam.height;
  l.w = d.w / cam.width;
  l.h = d.h / cam.height;
  return label_line(l);
}

ScenarioResult run_detect_eval(const ExperimentConfig& cfg, const RunOptions& opts) {
  ScenarioResult res;
  res.config_hash = cfg.hash();
  const World world(cfg.classroom.world);
  const TaskGeometry& geom = world.geometry();
  const CalibrationModel calib = ideal_eye_to_hand_calibration(cfg.eth_camera);
  const EihSensor& eih = cfg.classroom.sensor;

  struct Acc {
    int trials = 0, detected = 0;
    double center2 = 0.0, size2 = 0.0;
  };
  std::map<std::pair<int, int>, Acc> acc;  // (camera, class)
  double xy2 = 0.0, yaw2 = 0.0;
  int poses = 0, pose_failures = 0;

  for (int i = 0; i < cfg.trials; ++i) {
    const std::uint64_t s = derive_seed(cfg.seed, 3000 + static_cast<std::uint64_t>(i));
    const WorldState home = world.place_board(cfg.workspace, derive_seed(s, 1));
    Scene scene;
    scene.texture_seed = derive_seed(s, 2);
    scene.hole_box_margin = eih.hole_box_margin;
    const Pose bottleneck = compose(home.board_pose, cfg.classroom.skill.oec.bottleneck);
    const WorldState above = world.make_state(bottleneck, home.board_pose);

    json j;
    j["config_hash"] = hex64(res.config_hash);
    j["index"] = i;
    j["seed"] = s;
    j["board"] = pose_json(home.board_pose);
    const std::pair<const WorldState*, const CameraModel*> views[2] = {{&home, &cfg.eth_camera},
                                                                       {&above, &eih.camera}};
    const DetectorNoise noise[2] = {cfg.eth_noise, eih.noise};
    std::vector<Detection> eth_dets;
    for (int c = 0; c < 2; ++c) {
      const auto& [state, cam] = views[c];
      const auto oracle = oracle_boxes(*state, *cam, geom, scene);
      const auto dets = detect(*state, *cam, geom, noise[c], derive_seed(s, 3 + static_cast<std::uint64_t>(c)), scene);
      if (c == 0) eth_dets = dets;
      std::vector<std::string> lines;
      for (const Detection& o : oracle) {
        Acc& a = acc[{c, static_cast<int>(o.cls)}];
        ++a.trials;
        const auto d = find(dets, o.cls);
        if (!d) continue;
        ++a.detected;
        a.center2 += (d->center() - o.center()).squaredNorm();
        a.size2 += 0.5 * ((d->w - o.w) * (d->w - o.w) + (d->h - o.h) * (d->h - o.h));
        lines.push_back(det_label(*d, *cam));
      }
      if (opts.out_dir && cfg.detect.dump_images) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "%s_%04d", c == 0 ? "eth" : "eih", i);
        std::filesystem::create_directories(*opts.out_dir / "detect" / "images");
        write_pgm(*opts.out_dir / "detect" / "images" / (std::string(stem) + ".pgm"),
                  render(*state, *cam, geom, scene));
        std::string text;
        for (const auto& l : lines) text += l + "\n";
        write_text(*opts.out_dir / "detect" / "labels" / (std::string(stem) + ".txt"), text);
      }
    }
    try {
      const Pose est = estimate_board_pose(eth_dets, calib, cfg.workspace);
      xy2 += (est.xy() - home.board_pose.xy()).squaredNorm();
      const double dyaw = wrap_angle(est.rz - home.board_pose.rz);
      yaw2 += dyaw * dyaw;
      ++poses;
      j["estimate"] = pose_json(est);
    } catch (const Error& e) {
      ++pose_failures;
      j["estimate_error"] = e.what();
    }
    res.jsonl.push_back(j.dump());
  }

  Table& t = res.summary;
  t.comments = common_comments(cfg);
  t.comments.push_back("errors are RMS against the oracle boxes; pose row uses the exact camera map");
  t.header = {"camera", "object", "trials", "detected", "center_rmse_px", "size_rmse_px",
              "pose_xy_rmse_m", "pose_yaw_rmse_rad"};
  for (const auto& [key, a] : acc) {
    const double n = std::max(1, a.detected);
    t.rows.push_back({key.first == 0 ? "eye_to_hand" : "eye_in_hand",
                      std::string(to_string(static_cast<ObjectClass>(key.second))),
                      std::to_string(a.trials), std::to_string(a.detected),
                      fmt_num(std::sqrt(a.center2 / n)), fmt_num(std::sqrt(a.size2 / n)), "", ""});
  }
  const double n = std::max(1, poses);
  t.rows.push_back({"eye_to_hand", "board_pose", std::to_string(cfg.trials),
                    std::to_string(poses), "", "", fmt_num(std::sqrt(xy2 / n)),
                    fmt_num(std::sqrt(yaw2 / n))});
  (void)pose_failures;
  return res;
}

// ----------------------------------------------------------------------------
// train

ScenarioResult run_train(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!uses_residual_policy(cfg.baseline)) {
    throw ConfigError(std::string(to_string(cfg.baseline)) + " has no learned policy to train");
  }
  ScenarioResult res;
  res.config_hash = cfg.hash();
  const ClassroomConfig& cc = cfg.classroom;
  TrainingResult tr = run_training(cc, cfg.train_episodes, cfg.seed, [&](const CurveRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "episode %d reward %.2f success %d steps %d E_r %.4f%s",
                  r.episode, r.reward, r.success ? 1 : 0, r.steps, r.E_r,
                  r.window_success >= 0.0 ? (" window " + fmt_num(r.window_success)).c_str() : "");
    say(opts, buf);
  });
  res.curve = tr.curve;
  const auto evals = evaluate_classroom(cc, &tr.agent, cc.eval_E_r, cc.eval_episodes,
                                        derive_seed(cfg.seed, 9));
  std::vector<int> steps;
  for (const auto& e : evals) steps.push_back(e.steps);
  const StepStats st = step_stats(steps);

  double last_window = -1.0, best_window_at_eval = -1.0;
  for (const CurveRow& r : tr.curve) {
    if (r.window_success < 0.0) continue;
    last_window = r.window_success;
    if (r.E_r >= cc.eval_E_r[0] - 1e-12) best_window_at_eval = std::max(best_window_at_eval, r.window_success);
  }

  Table& t = res.summary;
  t.comments = common_comments(cfg);
  t.comments.push_back(baseline_note(cfg.baseline));
  t.comments.push_back("eval columns: deterministic classroom episodes after training");
  t.header = {"baseline",      "episodes",        "final_E_r_m",      "last_window_success",
              "best_window_success_at_eval_E_r", "eval_E_r_m", "eval_episodes",
              "eval_success_rate", "eval_mean_steps", "eval_std_steps"};
  t.rows.push_back({std::string(to_string(cfg.baseline)), std::to_string(cfg.train_episodes),
                    fmt_num(tr.curriculum.E_r[0]), fmt_num(last_window), fmt_num(best_window_at_eval),
                    fmt_num(cc.eval_E_r[0]), std::to_string(evals.size()),
                    fmt_num(success_rate(evals)), fmt_num(st.mean), fmt_num(st.std)});
  for (const CurveRow& r : tr.curve) {
    json j;
    j["config_hash"] = hex64(res.config_hash);
    j["episode"] = r.episode;
    j["reward"] = r.reward;
    j["success"] = r.success;
    j["steps"] = r.steps;
    j["E_r"] = r.E_r;
    res.jsonl.push_back(j.dump());
  }
  if (opts.out_dir || opts.checkpoint) {
    const std::filesystem::path ckpt =
        opts.checkpoint ? *opts.checkpoint : *opts.out_dir / "policy.ckpt";
    save_checkpoint(ckpt, Checkpoint{res.config_hash, cc.obs, tr.curriculum.E_r, tr.agent});
  }
  if (opts.out_dir) write_table(*opts.out_dir / "learning_curve.csv", learning_curve_table(res.curve, res.config_hash));
  return res;
}

// ----------------------------------------------------------------------------
// eval

ScenarioResult run_eval(const ExperimentConfig& base_cfg, const RunOptions& opts) {
  ScenarioResult res;
  res.config_hash = base_cfg.hash();
  // A policy plans with the error range it was trained on unless told otherwise.
  ExperimentConfig cfg = base_cfg;
  std::optional<SacAgent> agent;
  if (uses_residual_policy(cfg.baseline)) {
    if (opts.checkpoint) {
      Checkpoint ck = load_checkpoint(*opts.checkpoint);
      if (ck.obs.mode != cfg.classroom.obs.mode || ck.obs.dim() != cfg.classroom.obs.dim()) {
        throw ConfigError("checkpoint observation layout does not match baseline " +
                          std::string(to_string(cfg.baseline)));
      }
      if (cfg.eval.E_r_from_checkpoint) cfg.classroom.skill.E_r = ck.final_E_r;
      agent = std::move(ck.agent);
    } else if (cfg.baseline == Baseline::PureRL_B3) {
      agent = SacAgent(cfg.classroom.obs.dim(), 4, cfg.classroom.sac, derive_seed(cfg.seed, 1));
    } else {
      throw MissingCheckpoint(std::string(to_string(cfg.baseline)) + " needs --checkpoint");
    }
  }
  say(opts, "inline calibration");
  const CalibrationModel calib = inline_calibration(cfg);
  res.episodes.resize(static_cast<std::size_t>(cfg.trials));
  const SacAgent* a = agent ? &*agent : nullptr;
  ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.trials; ++i) {
    errors.guard([&] { res.episodes[static_cast<std::size_t>(i)] = run_eval_episode(cfg, calib, a, i); });
  }
  errors.rethrow();
  for (const auto& r : res.episodes) {
    say(opts, "trial " + std::to_string(r.index) + (r.success ? " success" : " failure") +
                  " steps " + std::to_string(r.steps) + (r.fault.empty() ? "" : " (" + r.fault + ")"));
    res.jsonl.push_back(episode_json(r, res.config_hash));
  }
  res.summary = eval_summary(cfg, res.episodes);
  return res;
}

}  // namespace

StepStats step_stats(const std::vector<int>& steps) {
  StepStats s;
  if (steps.empty()) return s;
  double sum = 0.0;
  for (int v : steps) sum += v;
  s.mean = sum / static_cast<double>(steps.size());
  if (steps.size() > 1) {
    double ss = 0.0;
    for (int v : steps) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(steps.size() - 1));
  }
  return s;
}

CalibrationModel inline_calibration(const ExperimentConfig& cfg) {
  const SampleSet set = collect_samples(cfg.workspace, cfg.classroom.world.geometry,
                                        cfg.eval.calib_placements, cfg.eval.calib_offsets,
                                        derive_seed(cfg.seed, 7), collect_config(cfg, false));
  const auto manual = manual_labels(set, static_cast<std::size_t>(cfg.eval.calib_manual),
                                    cfg.calib.label_sigma_px, derive_seed(cfg.seed, 8));
  const CalibrationModel first = calibrate_from_labels(set, manual);
  std::vector<LabelRecord> all = manual;
  const auto autos = auto_label(set, manual, first);
  all.insert(all.end(), autos.begin(), autos.end());
  return calibrate_from_labels(set, all);
}

EpisodeRecord run_eval_episode(const ExperimentConfig& cfg, const CalibrationModel& calib,
                               const SacAgent* agent, int index) {
  const auto t0 = std::chrono::steady_clock::now();
  if (uses_residual_policy(cfg.baseline) && agent == nullptr) {
    throw MissingCheckpoint("residual baseline evaluated without a policy");
  }
  WorldParams wp = cfg.classroom.world;
  wp.board_movable = cfg.eval.board_movable;
  const World world(wp);
  const TaskGeometry& geom = world.geometry();
  const SkillGraphSpec& spec = cfg.classroom.skill;
  const ClassroomConfig& cc = cfg.classroom;

  EpisodeRecord rec;
  rec.index = index;
  rec.seed = derive_seed(cfg.seed, 5000 + static_cast<std::uint64_t>(index));
  WorldState state = world.place_board(cfg.workspace, derive_seed(rec.seed, 1));
  rec.board = state.board_pose;
  const std::uint64_t texture = derive_seed(rec.seed, 2);
  Scene scene;
  scene.texture_seed = texture;
  scene.hole_box_margin = cc.sensor.hole_box_margin;

  SkillContext ctx;
  Vec4 v = Vec4::Zero();
  double t = 0.0;
  std::mt19937_64 act_rng(derive_seed(rec.seed, 3));
  ObservationBuilder builder(cc.obs);
  std::optional<SpiralController> spiral;
  Stage last = Stage::GlobalPerceive;
  rec.stage_trace.emplace_back(to_string(last));

  while (true) {
    Perception perception;
    if (ctx.stage == Stage::GlobalPerceive) {
      const auto dets = detect(state, cfg.eth_camera, geom, cfg.eth_noise,
                               derive_seed(rec.seed, 100 + static_cast<std::uint64_t>(ctx.steps)), scene);
      try {
        perception.board_estimate = estimate_board_pose(dets, calib, cfg.workspace);
      } catch (const Error& e) {
        perception.failure = e.what();
      }
    }
    const SkillStep step = skill_step(spec, ctx, state, perception, t);
    if (step.next != last) {
      last = step.next;
      rec.stage_trace.emplace_back(to_string(last));
    }
    if (step.next == Stage::Done || step.next == Stage::Fault) {
      rec.success = step.next == Stage::Done;
      if (step.fault) rec.fault = std::string(to_string(step.fault->stage)) + ": " + step.fault->reason;
      break;
    }
    ControlCommand cmd = step.cmd;
    if (step.next == Stage::FineManip) {
      const CoarsePolicy& plan = *ctx.plan;
      switch (cfg.baseline) {
        case Baseline::DirectPose_B1:
          cmd = direct_pose_command(step, plan, spec, cfg.eval.b1_overshoot);
          break;
        case Baseline::TeachSearch_B2:
          if (!spiral) {
            spiral.emplace(plan, geom,
                           SpiralParams{cfg.eval.b2_pitch, cfg.eval.b2_feed, cfg.eval.b2_press,
                                        cfg.eval.b2_contact_fz});
          }
          cmd = spiral->command(step, state);
          break;
        default: {
          if (cfg.baseline == Baseline::PureRL_B3) cmd = zero_base(cmd, plan);
          const Image img = policy_image(state, geom, cc.sensor, cc.obs, texture,
                                         derive_seed(rec.seed, 200 + static_cast<std::uint64_t>(ctx.steps)));
          const auto obs = builder.build(
              img, normalized_pose(state.ee_pose, plan.goal, plan.W, cc.obs.clamp),
              normalized_wrench(state.contact_wrench, plan.goal, spec.F_max, cc.obs.clamp));
          cmd = combine(cmd, agent->act(obs, ActMode::Deterministic, act_rng), spec.F_max, plan.goal.rz);
          break;
        }
      }
    }
    const TickSummary tick = execute(world, state, v, cmd);
    state = tick.state;
    v = tick.v;
    t += kPolicyDt;
    rec.max_force = std::max(rec.max_force, tick.max_force);
  }
  rec.steps = ctx.steps;
  rec.board_estimate = ctx.board_estimate;
  if (ctx.plan) rec.planned_goal = ctx.plan->goal;
  rec.final_ee = state.ee_pose;
  rec.final_wrench = state.contact_wrench;
  rec.board_displacement = (state.board_pose.xy() - rec.board.xy()).norm();
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

bool replay_success(const SkillGraphSpec& spec, const EpisodeRecord& r) {
  if (!r.planned_goal) return false;
  return within(task_difference(r.final_ee, *r.planned_goal), spec.e_th_goal) &&
         r.final_wrench.fz >= spec.F_z_succ;
}

Table eval_summary(const ExperimentConfig& cfg, const std::vector<EpisodeRecord>& records) {
  Table t;
  t.comments = common_comments(cfg);
  t.comments.push_back(baseline_note(cfg.baseline));
  const Vec4& er = cfg.classroom.skill.E_r;
  t.comments.push_back("planner error range x,y,z,rz = " + fmt_num(er[0]) + "," + fmt_num(er[1]) + "," +
                       fmt_num(er[2]) + "," + fmt_num(er[3]));
  t.comments.push_back("steps are policy steps (5 Hz) over the whole episode; faulted episodes "
                       "count in the all-episode columns");
  t.header = {"baseline",       "trials",         "successes",        "success_rate",
              "mean_steps",     "std_steps",      "mean_steps_success", "std_steps_success",
              "mean_max_force_n", "max_board_displacement_m", "degenerate"};
  std::vector<int> all, ok;
  double force = 0.0, disp = 0.0;
  for (const auto& r : records) {
    all.push_back(r.steps);
    if (r.success) ok.push_back(r.steps);
    force += r.max_force;
    disp = std::max(disp, r.board_displacement);
  }
  const bool degenerate = records.empty();
  const StepStats sa = step_stats(all), so = step_stats(ok);
  const double n = degenerate ? 1.0 : static_cast<double>(records.size());
  t.rows.push_back({std::string(to_string(cfg.baseline)), std::to_string(records.size()),
                    std::to_string(ok.size()), fmt_num(degenerate ? 0.0 : ok.size() / n),
                    fmt_num(sa.mean), fmt_num(sa.std), fmt_num(so.mean), fmt_num(so.std),
                    fmt_num(force / n), fmt_num(disp), degenerate ? "1" : "0"});
  return t;
}

std::string episode_json(const EpisodeRecord& r, std::uint64_t config_hash) {
  json j;
  j["config_hash"] = hex64(config_hash);
  j["index"] = r.index;
  j["seed"] = r.seed;
  j["board"] = pose_json(r.board);
  j["board_estimate"] = r.board_estimate ? pose_json(*r.board_estimate) : json(nullptr);
  j["stage_trace"] = r.stage_trace;
  j["fault"] = r.fault;
  j["steps"] = r.steps;
  j["success"] = r.success;
  j["max_force"] = r.max_force;
  j["board_displacement"] = r.board_displacement;
  j["final_ee"] = pose_json(r.final_ee);
  j["final_wrench"] = json::array({r.final_wrench.fx, r.final_wrench.fy, r.final_wrench.fz, r.final_wrench.tz});
  j["planned_goal"] = r.planned_goal ? pose_json(*r.planned_goal) : json(nullptr);
  j["wall_time_s"] = r.wall_time;
  return j.dump();
}

ScenarioResult run_scenario(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  ScenarioResult res;
  switch (cfg.scenario) {
    case Scenario::Calibrate: res = run_calibrate(cfg, opts); break;
    case Scenario::DetectEval: res = run_detect_eval(cfg, opts); break;
    case Scenario::TrainResidual: res = run_train(cfg, opts); break;
    case Scenario::EvalSemiStructured: res = run_eval(cfg, opts); break;
  }
  if (opts.out_dir) {
    write_table(*opts.out_dir / "summary.csv", res.summary);
    write_jsonl(*opts.out_dir / "episodes.jsonl", res.jsonl);
    write_text(*opts.out_dir / "config.resolved", cfg.canonical());
  }
  return res;
}

}  // namespace cogman
