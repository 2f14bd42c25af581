#include "cogman/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cogman/errors.hpp"

namespace cogman {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Calibrate: return "calibrate";
    case Scenario::DetectEval: return "detect-eval";
    case Scenario::TrainResidual: return "train";
    case Scenario::EvalSemiStructured: return "eval";
  }
  return "unknown";
}

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::DirectPose_B1: return "direct_pose_b1";
    case Baseline::TeachSearch_B2: return "teach_search_b2";
    case Baseline::PureRL_B3: return "pure_rl_b3";
    case Baseline::ResidualForce_B4: return "residual_force_b4";
    case Baseline::ResidualRawVision_B5: return "residual_raw_vision_b5";
    case Baseline::Ours: return "ours";
  }
  return "unknown";
}

Baseline parse_baseline(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  static const std::map<std::string, Baseline> names{
      {"b1", Baseline::DirectPose_B1},        {"direct_pose_b1", Baseline::DirectPose_B1},
      {"b2", Baseline::TeachSearch_B2},       {"teach_search_b2", Baseline::TeachSearch_B2},
      {"b3", Baseline::PureRL_B3},            {"pure_rl_b3", Baseline::PureRL_B3},
      {"b4", Baseline::ResidualForce_B4},     {"residual_force_b4", Baseline::ResidualForce_B4},
      {"b5", Baseline::ResidualRawVision_B5}, {"residual_raw_vision_b5", Baseline::ResidualRawVision_B5},
      {"ours", Baseline::Ours},
  };
  const auto it = names.find(n);
  if (it == names.end()) throw ConfigError("unknown baseline '" + std::string(name) + "'");
  return it->second;
}

ObsMode obs_mode_for(Baseline b) {
  switch (b) {
    case Baseline::ResidualForce_B4: return ObsMode::ProprioOnly;
    case Baseline::ResidualRawVision_B5: return ObsMode::FullImage;
    default: return ObsMode::Attention;
  }
}

bool uses_residual_policy(Baseline b) {
  return b == Baseline::PureRL_B3 || b == Baseline::ResidualForce_B4 ||
         b == Baseline::ResidualRawVision_B5 || b == Baseline::Ours;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("expected a finite number, got '" + s + "'");
  }
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  Int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

std::vector<int> to_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int<int>(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated integer list");
  return out;
}

std::string from_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

using Cfg = ExperimentConfig;

ConfigField real(std::string key, std::string doc, std::function<double&(Cfg&)> ref) {
  return {std::move(key), std::move(doc),
          [ref](const Cfg& c) { return fmt(ref(const_cast<Cfg&>(c))); },
          [ref](Cfg& c, const std::string& v) { ref(c) = to_double(v); }};
}

ConfigField integer(std::string key, std::string doc, std::function<int&(Cfg&)> ref) {
  return {std::move(key), std::move(doc),
          [ref](const Cfg& c) { return std::to_string(ref(const_cast<Cfg&>(c))); },
          [ref](Cfg& c, const std::string& v) { ref(c) = to_int<int>(v); }};
}

ConfigField flag(std::string key, std::string doc, std::function<bool&(Cfg&)> ref) {
  return {std::move(key), std::move(doc),
          [ref](const Cfg& c) { return std::string(ref(const_cast<Cfg&>(c)) ? "true" : "false"); },
          [ref](Cfg& c, const std::string& v) { ref(c) = to_bool(v); }};
}

// Two components set together, e.g. x and y of a Vec4.
ConfigField pair(std::string key, std::string doc, std::function<Vec4&(Cfg&)> ref, int i) {
  return {std::move(key), std::move(doc),
          [ref, i](const Cfg& c) { return fmt(ref(const_cast<Cfg&>(c))[i]); },
          [ref, i](Cfg& c, const std::string& v) {
            const double d = to_double(v);
            ref(c)[i] = d;
            ref(c)[i + 1] = d;
          }};
}

ConfigField component(std::string key, std::string doc, std::function<Vec4&(Cfg&)> ref, int i) {
  return {std::move(key), std::move(doc),
          [ref, i](const Cfg& c) { return fmt(ref(const_cast<Cfg&>(c))[i]); },
          [ref, i](Cfg& c, const std::string& v) { ref(c)[i] = to_double(v); }};
}

std::vector<ConfigField> build_fields() {
  std::vector<ConfigField> f;
  // General
  f.push_back({"baseline", "policy or baseline: ours, b1 .. b5",
               [](const Cfg& c) { return std::string(to_string(c.baseline)); },
               [](Cfg& c, const std::string& v) { c.baseline = parse_baseline(v); }});
  f.push_back({"seed", "master seed (unsigned 64-bit)",
               [](const Cfg& c) { return std::to_string(c.seed); },
               [](Cfg& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); }});
  f.push_back(integer("trials", "episodes (eval) or scenes (detect-eval)", [](Cfg& c) -> int& { return c.trials; }));

  // Workspace
  f.push_back(real("workspace.x_min", "board x range, m", [](Cfg& c) -> double& { return c.workspace.x_range.lo; }));
  f.push_back(real("workspace.x_max", "", [](Cfg& c) -> double& { return c.workspace.x_range.hi; }));
  f.push_back(real("workspace.y_min", "board y range, m", [](Cfg& c) -> double& { return c.workspace.y_range.lo; }));
  f.push_back(real("workspace.y_max", "", [](Cfg& c) -> double& { return c.workspace.y_range.hi; }));
  f.push_back(real("workspace.rz_min", "board yaw range, rad", [](Cfg& c) -> double& { return c.workspace.rz_range.lo; }));
  f.push_back(real("workspace.rz_max", "", [](Cfg& c) -> double& { return c.workspace.rz_range.hi; }));
  f.push_back(real("workspace.home_x", "end-effector home, m", [](Cfg& c) -> double& { return c.workspace.home.x; }));
  f.push_back(real("workspace.home_y", "", [](Cfg& c) -> double& { return c.workspace.home.y; }));
  f.push_back(real("workspace.home_z", "", [](Cfg& c) -> double& { return c.workspace.home.z; }));

  // Geometry and contact
  auto geom = [](Cfg& c) -> TaskGeometry& { return c.classroom.world.geometry; };
  f.push_back(real("geometry.peg_radius", "m", [geom](Cfg& c) -> double& { return geom(c).peg_radius; }));
  f.push_back(real("geometry.hole_radius", "m; clearance = hole - peg radius", [geom](Cfg& c) -> double& { return geom(c).hole_radius; }));
  f.push_back(real("geometry.hole_depth", "m", [geom](Cfg& c) -> double& { return geom(c).hole_depth; }));
  f.push_back(real("geometry.board_top", "board top above the table, m", [geom](Cfg& c) -> double& { return geom(c).board_top; }));
  auto contact = [](Cfg& c) -> ContactParams& { return c.classroom.world.contact; };
  f.push_back(real("contact.k_n", "penalty stiffness, N/m", [contact](Cfg& c) -> double& { return contact(c).k_n; }));
  f.push_back(real("contact.c_n", "penalty damping, N s/m", [contact](Cfg& c) -> double& { return contact(c).c_n; }));
  f.push_back(real("contact.mu_peg", "peg/board friction", [contact](Cfg& c) -> double& { return contact(c).mu_peg; }));
  f.push_back(real("contact.mu_static", "board/table static friction", [contact](Cfg& c) -> double& { return contact(c).mu_static; }));
  f.push_back(real("contact.mu_kinetic", "board/table kinetic friction", [contact](Cfg& c) -> double& { return contact(c).mu_kinetic; }));
  f.push_back(real("contact.board_mass", "kg", [contact](Cfg& c) -> double& { return contact(c).board_mass; }));
  f.push_back(real("contact.slide_mobility", "board slide speed per N of excess load, m/(s N)", [contact](Cfg& c) -> double& { return contact(c).slide_mobility; }));
  f.push_back(integer("world.substeps", "physics substeps per 120 Hz tick", [](Cfg& c) -> int& { return c.classroom.world.substeps; }));

  // Cameras and detector noise
  f.push_back(real("camera.eth_scale", "eye-to-hand px/m", [](Cfg& c) -> double& { return c.eth_camera.scale; }));
  f.push_back(real("camera.eth_yaw", "eye-to-hand mount yaw, rad", [](Cfg& c) -> double& { return c.eth_camera.mount_pose.rz; }));
  f.push_back(real("camera.eih_scale", "eye-in-hand px/m at the reference depth", [](Cfg& c) -> double& { return c.classroom.sensor.camera.scale; }));
  f.push_back(real("camera.hole_box_margin", "hole box side / hole diameter", [](Cfg& c) -> double& { return c.classroom.sensor.hole_box_margin; }));
  f.push_back(real("noise.eth_center_px", "eye-to-hand detector center noise, px", [](Cfg& c) -> double& { return c.eth_noise.sigma_center; }));
  f.push_back(real("noise.eth_size_px", "eye-to-hand detector size noise, px", [](Cfg& c) -> double& { return c.eth_noise.sigma_size; }));
  f.push_back(real("noise.eth_dropout", "probability a detection is missed", [](Cfg& c) -> double& { return c.eth_noise.dropout_prob; }));
  f.push_back(real("noise.eih_center_px", "eye-in-hand detector center noise, px", [](Cfg& c) -> double& { return c.classroom.sensor.noise.sigma_center; }));
  f.push_back(real("noise.eih_size_px", "eye-in-hand detector size noise, px", [](Cfg& c) -> double& { return c.classroom.sensor.noise.sigma_size; }));

  // Skill graph
  auto skill = [](Cfg& c) -> SkillGraphSpec& { return c.classroom.skill; };
  f.push_back(real("skill.F_max_xy", "safety force limit, N", [skill](Cfg& c) -> double& { return skill(c).F_max.fx; }));
  f.push_back(real("skill.F_max_z", "N", [skill](Cfg& c) -> double& { return skill(c).F_max.fz; }));
  f.push_back(real("skill.F_max_rz", "N m", [skill](Cfg& c) -> double& { return skill(c).F_max.tz; }));
  f.push_back(real("skill.T_cf", "contact-free segment duration, s", [skill](Cfg& c) -> double& { return skill(c).T_cf; }));
  f.push_back(real("skill.T_cr", "contact-rich segment duration, s", [skill](Cfg& c) -> double& { return skill(c).T_cr; }));
  f.push_back(pair("skill.K_cf_xy", "contact-free stiffness, N/m", [skill](Cfg& c) -> Vec4& { return skill(c).K_cf; }, 0));
  f.push_back(component("skill.K_cf_z", "N/m", [skill](Cfg& c) -> Vec4& { return skill(c).K_cf; }, 2));
  f.push_back(component("skill.K_cf_rz", "N m/rad", [skill](Cfg& c) -> Vec4& { return skill(c).K_cf; }, 3));
  f.push_back(real("skill.F_z_succ", "insertion success force, N", [skill](Cfg& c) -> double& { return skill(c).F_z_succ; }));
  f.push_back(integer("skill.episode_cap", "policy steps per episode", [skill](Cfg& c) -> int& { return skill(c).episode_cap; }));
  f.push_back(integer("skill.coarse_timeout", "policy steps allowed for the coarse move", [skill](Cfg& c) -> int& { return skill(c).coarse_timeout; }));

  // Learner
  auto cur = [](Cfg& c) -> CurriculumState& { return c.classroom.curriculum; };
  f.push_back(pair("curriculum.E_r0_xy", "initial error range, m", [cur](Cfg& c) -> Vec4& { return cur(c).E_r0; }, 0));
  f.push_back(component("curriculum.E_r0_z", "m", [cur](Cfg& c) -> Vec4& { return cur(c).E_r0; }, 2));
  f.push_back(component("curriculum.E_r0_rz", "rad (not adapted)", [cur](Cfg& c) -> Vec4& { return cur(c).E_r0; }, 3));
  f.push_back(real("curriculum.epsilon", "range step, m", [cur](Cfg& c) -> double& { return cur(c).epsilon; }));
  f.push_back(real("curriculum.alpha", "lower success band edge", [cur](Cfg& c) -> double& { return cur(c).alpha; }));
  f.push_back(real("curriculum.beta", "upper success band edge", [cur](Cfg& c) -> double& { return cur(c).beta; }));
  f.push_back(integer("curriculum.window", "episodes per curriculum update", [cur](Cfg& c) -> int& { return cur(c).window; }));
  f.push_back(real("curriculum.min_range", "lower clamp of the range, m", [cur](Cfg& c) -> double& { return cur(c).min_range; }));
  auto rw = [](Cfg& c) -> RewardSpec& { return c.classroom.reward; };
  f.push_back(real("reward.lambda1", "guidance weight", [rw](Cfg& c) -> double& { return rw(c).lambda1; }));
  f.push_back(real("reward.lambda2", "force weight", [rw](Cfg& c) -> double& { return rw(c).lambda2; }));
  f.push_back(real("reward.lambda3", "success weight", [rw](Cfg& c) -> double& { return rw(c).lambda3; }));
  f.push_back(real("reward.R_succ", "success reward", [rw](Cfg& c) -> double& { return rw(c).R_succ; }));
  f.push_back(integer("obs.crop", "attention crop side, px", [](Cfg& c) -> int& { return c.classroom.obs.crop; }));
  f.push_back(integer("obs.history", "previous (R_p, F) frames in the observation", [](Cfg& c) -> int& { return c.classroom.obs.history; }));
  f.push_back(real("obs.clamp", "observation clamp", [](Cfg& c) -> double& { return c.classroom.obs.clamp; }));
  auto sac = [](Cfg& c) -> SacConfig& { return c.classroom.sac; };
  f.push_back({"sac.hidden", "hidden layer widths, comma separated",
               [](const Cfg& c) { return from_int_list(c.classroom.sac.hidden); },
               [](Cfg& c, const std::string& v) { c.classroom.sac.hidden = to_int_list(v); }});
  f.push_back(real("sac.gamma", "discount", [sac](Cfg& c) -> double& { return sac(c).gamma; }));
  f.push_back(real("sac.tau", "target Polyak rate", [sac](Cfg& c) -> double& { return sac(c).tau; }));
  f.push_back(real("sac.lr", "Adam learning rate", [sac](Cfg& c) -> double& { return sac(c).lr; }));
  f.push_back(integer("sac.batch", "minibatch size", [sac](Cfg& c) -> int& { return sac(c).batch; }));
  f.push_back(real("sac.init_alpha", "initial entropy temperature", [sac](Cfg& c) -> double& { return sac(c).init_alpha; }));
  f.push_back(real("sac.target_entropy", "temperature target", [sac](Cfg& c) -> double& { return sac(c).target_entropy; }));
  f.push_back(real("sac.log_std_init", "log std of a fresh actor", [sac](Cfg& c) -> double& { return sac(c).log_std_init; }));
  f.push_back({"sac.replay_capacity", "transitions kept",
               [](const Cfg& c) { return std::to_string(c.classroom.sac.replay_capacity); },
               [](Cfg& c, const std::string& v) { c.classroom.sac.replay_capacity = to_int<std::size_t>(v); }});
  f.push_back(integer("train.episodes", "training episodes", [](Cfg& c) -> int& { return c.train_episodes; }));
  f.push_back(integer("train.updates_per_episode", "gradient updates after each episode", [](Cfg& c) -> int& { return c.classroom.updates_per_episode; }));
  f.push_back(integer("train.parallel_envs", "episodes rolled out concurrently", [](Cfg& c) -> int& { return c.classroom.parallel_envs; }));
  f.push_back(integer("train.eval_episodes", "deterministic episodes after training", [](Cfg& c) -> int& { return c.classroom.eval_episodes; }));
  f.push_back(pair("train.eval_E_r_xy", "error range of the post-training evaluation, m", [](Cfg& c) -> Vec4& { return c.classroom.eval_E_r; }, 0));
  f.push_back(real("classroom.board_x", "fixed classroom board pose", [](Cfg& c) -> double& { return c.classroom.board.x; }));
  f.push_back(real("classroom.board_y", "", [](Cfg& c) -> double& { return c.classroom.board.y; }));
  f.push_back(real("classroom.board_yaw", "", [](Cfg& c) -> double& { return c.classroom.board.rz; }));

  // Calibration and detection scenarios
  f.push_back(integer("calib.placements", "board placements m", [](Cfg& c) -> int& { return c.calib.placements; }));
  f.push_back(integer("calib.offsets", "bottleneck offsets n per placement", [](Cfg& c) -> int& { return c.calib.offsets; }));
  f.push_back({"calib.manual_counts", "manual label counts to evaluate, comma separated",
               [](const Cfg& c) { return from_int_list(c.calib.manual_counts); },
               [](Cfg& c, const std::string& v) { c.calib.manual_counts = to_int_list(v); }});
  f.push_back(real("calib.label_sigma_px", "manual annotation noise, px", [](Cfg& c) -> double& { return c.calib.label_sigma_px; }));
  f.push_back(flag("calib.render_images", "render images during collection", [](Cfg& c) -> bool& { return c.calib.render_images; }));
  f.push_back(flag("calib.write_dataset", "write images, labels and manifest", [](Cfg& c) -> bool& { return c.calib.write_dataset; }));
  f.push_back(flag("detect.dump_images", "write PGM frames and label files", [](Cfg& c) -> bool& { return c.detect.dump_images; }));

  // Semi-structured evaluation
  f.push_back(pair("eval.E_r_xy", "planner error range, m", [](Cfg& c) -> Vec4& { return c.eval.E_r; }, 0));
  f.push_back(component("eval.E_r_z", "m", [](Cfg& c) -> Vec4& { return c.eval.E_r; }, 2));
  f.push_back(component("eval.E_r_rz", "rad", [](Cfg& c) -> Vec4& { return c.eval.E_r; }, 3));
  f.push_back(flag("eval.E_r_from_checkpoint", "policy baselines plan with the checkpoint's final range", [](Cfg& c) -> bool& { return c.eval.E_r_from_checkpoint; }));
  f.push_back(flag("eval.board_movable", "board slides under excess load", [](Cfg& c) -> bool& { return c.eval.board_movable; }));
  f.push_back(integer("eval.calib_placements", "inline calibration placements", [](Cfg& c) -> int& { return c.eval.calib_placements; }));
  f.push_back(integer("eval.calib_offsets", "inline calibration offsets per placement", [](Cfg& c) -> int& { return c.eval.calib_offsets; }));
  f.push_back(integer("eval.calib_manual", "inline calibration manual labels", [](Cfg& c) -> int& { return c.eval.calib_manual; }));
  f.push_back(real("eval.b1_overshoot", "direct-pose descent target below the goal, m", [](Cfg& c) -> double& { return c.eval.b1_overshoot; }));
  f.push_back(real("eval.b2_pitch", "spiral pitch, m per turn", [](Cfg& c) -> double& { return c.eval.b2_pitch; }));
  f.push_back(real("eval.b2_feed", "spiral feed, m/s", [](Cfg& c) -> double& { return c.eval.b2_feed; }));
  f.push_back(real("eval.b2_press", "downward force while searching, N", [](Cfg& c) -> double& { return c.eval.b2_press; }));
  f.push_back(real("eval.b2_contact_fz", "surface contact threshold, N", [](Cfg& c) -> double& { return c.eval.b2_contact_fz; }));
  return f;
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = build_fields();
  return fields;
}

void set_field(ExperimentConfig& cfg, std::string_view key, const std::string& value) {
  for (const ConfigField& f : config_fields()) {
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void ExperimentConfig::finalize() {
  // F_max is symmetric in x and y; the xy key writes fx only.
  SkillGraphSpec& s = classroom.skill;
  s.F_max.fy = s.F_max.fx;
  s.workspace = workspace;
  s.oec = OecModel::from_geometry(classroom.world.geometry, workspace.home);
  s.E_r = eval.E_r;
  classroom.reward.F_max = s.F_max;
  classroom.curriculum.E_r = classroom.curriculum.E_r0;
  classroom.eval_E_r[2] = classroom.curriculum.E_r0[2];
  classroom.eval_E_r[3] = classroom.curriculum.E_r0[3];
  classroom.obs.mode = obs_mode_for(baseline);
  classroom.obs.image_side = classroom.sensor.camera.width;
  classroom.zero_base = baseline == Baseline::PureRL_B3;
  classroom.world.board_movable = false;
  validate();
}

void ExperimentConfig::validate() const {
  workspace.validate();
  eth_camera.validate();
  eth_noise.validate();
  classroom.validate();
  if (trials < 0 || train_episodes < 0) throw ConfigError("trials and episodes must be >= 0");
  if (calib.placements <= 0 || calib.offsets <= 0 || calib.placements * calib.offsets < 8) {
    throw ConfigError("calibration needs placements * offsets >= 8");
  }
  for (int m : calib.manual_counts) {
    if (m < 4) throw ConfigError("calibration needs at least 4 manual labels per fit");
  }
  if (!(calib.label_sigma_px >= 0.0)) throw ConfigError("label noise must be >= 0");
  if (eval.calib_placements <= 0 || eval.calib_offsets <= 0 || eval.calib_manual < 4 ||
      eval.calib_placements * eval.calib_offsets < 8) {
    throw ConfigError("inline calibration needs placements * offsets >= 8 and >= 4 manual labels");
  }
  if (!(eval.E_r.minCoeff() >= 0.0) || !(eval.b2_pitch > 0.0) || !(eval.b2_feed > 0.0) ||
      !(eval.b1_overshoot >= 0.0) || !(eval.b2_press >= 0.0) || !(eval.b2_contact_fz > 0.0)) {
    throw ConfigError("evaluation parameters out of range");
  }
  if (eval.b2_press > std::abs(classroom.skill.F_max.fz)) {
    throw ConfigError("eval.b2_press exceeds F_max");
  }
}

std::string ExperimentConfig::canonical() const {
  std::vector<std::string> lines;
  for (const ConfigField& f : config_fields()) lines.push_back(f.key + " = " + f.get(*this));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(number) + ": empty key or value");
    }
    try {
      set_field(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace cogman
