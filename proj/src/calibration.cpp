#include "cogman/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "cogman/errors.hpp"
#include "cogman/executor.hpp"
#include "cogman/least_squares.hpp"

namespace cogman {

Vec2 CalibrationModel::robot_to_pixel(const Vec2& p) const {
  if (!has_eye_to_hand) throw MissingCalibration("eye-to-hand map not fitted");
  return A * Vec3{p.x(), p.y(), 1.0};
}

Vec2 CalibrationModel::pixel_to_robot(const Vec2& px) const {
  if (!has_eye_to_hand) throw MissingCalibration("eye-to-hand map not fitted");
  return Binv * Vec3{px.x(), px.y(), 1.0};
}

Vec4 CalibrationModel::corner_offsets(const Vec3& offset) const {
  if (!has_eye_in_hand) throw MissingCalibration("eye-in-hand Jacobian not fitted");
  return C * Vec4{offset.x(), offset.y(), offset.z(), 1.0};
}

namespace {

Vec2 feature_world(const Pose& board, const TaskGeometry& geom, int i) {
  const Vec2& f = geom.feature_points[static_cast<std::size_t>(i)];
  return compose(board, Pose::planar(f.x(), f.y(), 0.0, 0.0)).xy();
}

// Robot-frame point an eye-to-hand label of `cls` refers to.
Vec2 eth_anchor(const EthRecord& r, const TaskGeometry& geom, ObjectClass cls) {
  switch (cls) {
    case ObjectClass::Feature1: return feature_world(r.state.board_pose, geom, 0);
    case ObjectClass::Feature2: return feature_world(r.state.board_pose, geom, 1);
    default: return r.position;
  }
}

const CameraModel& camera_of(const SampleSet& set, CameraKind k) {
  return k == CameraKind::EyeToHand ? set.eth_camera : set.eih_camera;
}

Vec4 box_pixels(const LabelRecord& l, const CameraModel& cam) {
  return {l.cx * cam.width, l.cy * cam.height, l.w * cam.width, l.h * cam.height};
}

LabelRecord make_label(std::size_t id, CameraKind camera, const Detection& d, const CameraModel& cam,
                       LabelSource src) {
  auto norm = [](double v, double extent) { return std::clamp(v / extent, 0.0, 1.0); };
  LabelRecord r;
  r.image_id = id;
  r.camera = camera;
  r.cls = d.cls;
  r.cx = norm(d.cx, cam.width);
  r.cy = norm(d.cy, cam.height);
  r.w = norm(d.w, cam.width);
  r.h = norm(d.h, cam.height);
  r.source = src;
  return r;
}

std::vector<Detection> oracle_for(const SampleSet& set, CameraKind k, std::size_t id) {
  Scene scene;
  scene.hole_box_margin = set.hole_box_margin;
  if (k == CameraKind::EyeToHand) {
    return oracle_boxes(set.eth[id].state, set.eth_camera, set.geometry, scene);
  }
  return oracle_boxes(set.eih[id].state, set.eih_camera, set.geometry, scene);
}

struct LabelFits {
  EthFit eth;
  JacobianFit jac;
  bool has_eth = false;
  bool has_eih = false;
};

LabelFits fit_labels(const SampleSet& set, const std::vector<LabelRecord>& labels) {
  std::vector<std::pair<Vec2, Vec2>> eth_pairs;
  std::vector<std::pair<Vec3, Vec4>> eih_pairs;
  const Vec2 pp = set.eih_camera.principal_point;
  for (const LabelRecord& l : labels) {
    if (l.camera == CameraKind::EyeToHand) {
      const Vec4 b = box_pixels(l, set.eth_camera);
      eth_pairs.emplace_back(eth_anchor(set.eth.at(l.image_id), set.geometry, l.cls), b.head<2>());
    } else {
      const Vec4 b = box_pixels(l, set.eih_camera);
      const Vec4 corners{b[0] - 0.5 * b[2] - pp.x(), b[1] - 0.5 * b[3] - pp.y(),
                         b[0] + 0.5 * b[2] - pp.x(), b[1] + 0.5 * b[3] - pp.y()};
      eih_pairs.emplace_back(set.eih.at(l.image_id).offset, corners);
    }
  }
  LabelFits f;
  if (!eth_pairs.empty()) {
    f.eth = fit_eth(eth_pairs);
    f.has_eth = true;
  }
  if (!eih_pairs.empty()) {
    f.jac = fit_image_jacobian(eih_pairs);
    f.has_eih = true;
  }
  return f;
}

}  // namespace

SampleSet collect_samples(const WorkspaceSpec& ws, const TaskGeometry& geom, int m, int n,
                          std::uint64_t seed, const CollectConfig& cfg) {
  if (m <= 0 || n <= 0 || m * n < 8) throw ConfigError("collection needs m * n >= 8");
  ws.validate();
  WorldParams wp = cfg.world;
  wp.geometry = geom;
  const World world(wp);
  const OecModel oec = OecModel::from_geometry(geom, ws.home, cfg.approach_height);
  const Vec4 K_cf{2000.0, 2000.0, 2000.0, 20.0};

  SampleSet set;
  set.m = m;
  set.n = n;
  set.eth_camera = cfg.eth_camera;
  set.eih_camera = cfg.eih_camera;
  set.geometry = geom;
  set.hole_box_margin = cfg.hole_box_margin;
  set.seed = seed;

  std::mt19937_64 offset_rng(derive_seed(seed, 1));
  auto draw = [&](double r) { return -r + 2.0 * r * uniform01(offset_rng); };

  for (int j = 0; j < m; ++j) {
    const Pose board = sample_uniform(ws, derive_seed(seed, 100 + static_cast<std::uint64_t>(j)));
    const std::uint64_t tex = derive_seed(seed, 10000 + static_cast<std::uint64_t>(j));
    Scene scene;
    scene.texture_seed = tex;
    scene.hole_box_margin = cfg.hole_box_margin;

    const WorldState at_home = world.make_state(ws.home, board);
    Image eth_image;
    if (cfg.render_images) eth_image = render(at_home, cfg.eth_camera, geom, scene);

    const Pose bottleneck = compose(board, oec.bottleneck);
    WorldState state = at_home;
    Vec4 v = Vec4::Zero();
    for (int k = 0; k < n; ++k) {
      Vec3 off;
      while (true) {
        off = {draw(cfg.offset_range.x()), draw(cfg.offset_range.y()), draw(cfg.offset_range.z())};
        if (off.z() >= 0.0) break;
        ++set.pruned_offsets;
      }
      const Pose target = compose(bottleneck, Pose::planar(off.x(), off.y(), off.z(), 0.0));
      const double T = k == 0 ? 3.0 : cfg.move_time;
      ControlCommand cmd;
      cmd.segment = TrajectorySegment{state.ee_pose, target, T, 0.0};
      cmd.X_d = target;
      cmd.K = K_cf;
      const int ticks = static_cast<int>(std::lround((T + cfg.settle_time) / kControlDt));
      const TickSummary res = execute(world, state, v, cmd, ticks);
      state = res.state;
      v = res.v;

      const Pose achieved = compose(inverse(bottleneck), state.ee_pose);
      EihRecord eih;
      eih.offset = {achieved.x, achieved.y, achieved.z};
      eih.state = state;
      eih.texture_seed = tex;
      if (cfg.render_images) eih.image = render(state, cfg.eih_camera, geom, scene);
      set.eih.push_back(std::move(eih));

      EthRecord eth;
      eth.image = eth_image;
      eth.position = board.xy();
      eth.yaw = board.rz;
      eth.state = at_home;
      eth.texture_seed = tex;
      set.eth.push_back(std::move(eth));
    }
  }
  return set;
}

EthFit fit_eth(const std::vector<std::pair<Vec2, Vec2>>& pairs) {
  const auto n = static_cast<Eigen::Index>(pairs.size());
  if (n < 4) throw DegenerateDesign("eye-to-hand fit needs at least 4 pairs");
  Eigen::MatrixXd R(n, 3), P(n, 3), Yr(n, 2), Yp(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [r, p] = pairs[static_cast<std::size_t>(i)];
    R.row(i) << r.x(), r.y(), 1.0;
    P.row(i) << p.x(), p.y(), 1.0;
    Yr.row(i) << r.x(), r.y();
    Yp.row(i) << p.x(), p.y();
  }
  const LinearFit fwd = fit_linear(R, Yp);
  const LinearFit inv = fit_linear(P, Yr);
  EthFit out;
  out.A = fwd.coef.transpose();
  out.Binv = inv.coef.transpose();
  out.std_fwd = fwd.residual_std;
  out.std_inv = inv.residual_std;
  out.pooled_fwd = fwd.pooled_std;
  out.pooled_inv = inv.pooled_std;
  return out;
}

JacobianFit fit_image_jacobian(const std::vector<std::pair<Vec3, Vec4>>& pairs) {
  const auto n = static_cast<Eigen::Index>(pairs.size());
  if (n < 4) throw DegenerateDesign("image Jacobian fit needs at least 4 pairs");
  Eigen::MatrixXd X(n, 4), Y(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [d, c] = pairs[static_cast<std::size_t>(i)];
    X.row(i) << d.x(), d.y(), d.z(), 1.0;
    Y.row(i) = c.transpose();
  }
  const LinearFit fit = fit_linear(X, Y);
  JacobianFit out;
  out.C = fit.coef.transpose();
  out.std = fit.residual_std;
  out.pooled = fit.pooled_std;
  return out;
}

std::string_view to_string(LabelSource s) { return s == LabelSource::Manual ? "manual" : "auto"; }

std::vector<std::size_t> manual_indices(std::size_t total, std::size_t count) {
  count = std::min(count, total);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(i * total / count);
  return out;
}

std::vector<LabelRecord> manual_labels(const SampleSet& set, std::size_t count, double sigma_px,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma_px);
  std::vector<LabelRecord> out;
  for (std::size_t id : manual_indices(set.eth.size(), count)) {
    for (CameraKind k : {CameraKind::EyeToHand, CameraKind::EyeInHand}) {
      for (Detection d : oracle_for(set, k, id)) {
        d.cx += gauss(rng);
        d.cy += gauss(rng);
        d.w += gauss(rng);
        d.h += gauss(rng);
        out.push_back(make_label(id, k, d, camera_of(set, k), LabelSource::Manual));
      }
    }
  }
  return out;
}

CalibrationModel calibrate_from_labels(const SampleSet& set, const std::vector<LabelRecord>& labels) {
  const LabelFits f = fit_labels(set, labels);
  CalibrationModel m;
  if (f.has_eth) {
    m.A = f.eth.A;
    m.Binv = f.eth.Binv;
    m.std_fwd = f.eth.std_fwd;
    m.std_inv = f.eth.std_inv;
    m.has_eye_to_hand = true;
  }
  if (f.has_eih) {
    m.C = f.jac.C;
    m.std_jac = f.jac.std;
    m.has_eye_in_hand = true;
  }
  return m;
}

std::vector<LabelRecord> auto_label(const SampleSet& set, const std::vector<LabelRecord>& manual,
                                    const CalibrationModel& calib) {
  std::set<std::size_t> eth_done, eih_done;
  std::map<ObjectClass, std::pair<Vec2, int>> sizes;
  for (const LabelRecord& l : manual) {
    if (l.camera == CameraKind::EyeToHand) {
      eth_done.insert(l.image_id);
      auto& [sum, count] = sizes.try_emplace(l.cls, Vec2::Zero(), 0).first->second;
      sum += Vec2{l.w * set.eth_camera.width, l.h * set.eth_camera.height};
      ++count;
    } else {
      eih_done.insert(l.image_id);
    }
  }
  if (eth_done.empty() || eih_done.empty()) {
    throw MissingCalibration("manual labels must cover both cameras");
  }
  if (!calib.has_eye_to_hand || !calib.has_eye_in_hand) {
    throw MissingCalibration("auto labelling needs both calibrated maps");
  }

  std::vector<LabelRecord> out;
  const CameraModel& ec = set.eth_camera;
  for (std::size_t id = 0; id < set.eth.size(); ++id) {
    if (eth_done.count(id)) continue;
    for (ObjectClass cls : {ObjectClass::Board, ObjectClass::Feature1, ObjectClass::Feature2}) {
      const auto it = sizes.find(cls);
      if (it == sizes.end()) continue;
      const Vec2 c = calib.robot_to_pixel(eth_anchor(set.eth[id], set.geometry, cls));
      if (c.x() < 0 || c.y() < 0 || c.x() >= ec.width || c.y() >= ec.height) continue;
      const Vec2 size = it->second.first / it->second.second;
      const Detection d{cls, c.x(), c.y(), size.x(), size.y(), 1.0};
      out.push_back(make_label(id, CameraKind::EyeToHand, d, ec, LabelSource::Auto));
    }
  }
  const CameraModel& ic = set.eih_camera;
  for (std::size_t id = 0; id < set.eih.size(); ++id) {
    if (eih_done.count(id)) continue;
    const Vec4 k = calib.corner_offsets(set.eih[id].offset);
    const Detection d{ObjectClass::Hole,
                      ic.principal_point.x() + 0.5 * (k[0] + k[2]),
                      ic.principal_point.y() + 0.5 * (k[1] + k[3]),
                      k[2] - k[0],
                      k[3] - k[1],
                      1.0};
    out.push_back(make_label(id, CameraKind::EyeInHand, d, ic, LabelSource::Auto));
  }
  return out;
}

std::vector<QualityRow> label_quality_report(const SampleSet& set,
                                             const std::vector<LabelRecord>& labels) {
  struct Acc {
    std::size_t n = 0;
    double center = 0.0, size = 0.0;
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (const LabelRecord& l : labels) {
    const CameraModel& cam = camera_of(set, l.camera);
    const auto truth = find(oracle_for(set, l.camera, l.image_id), l.cls);
    if (!truth) continue;
    const Vec4 b = box_pixels(l, cam);
    Acc& a = acc[{static_cast<int>(l.camera), static_cast<int>(l.source)}];
    ++a.n;
    a.center += 0.5 * (std::pow(b[0] - truth->cx, 2) + std::pow(b[1] - truth->cy, 2));
    a.size += 0.5 * (std::pow(b[2] - truth->w, 2) + std::pow(b[3] - truth->h, 2));
  }
  std::vector<QualityRow> rows;
  for (const auto& [key, a] : acc) {
    QualityRow r;
    r.camera = static_cast<CameraKind>(key.first);
    r.source = static_cast<LabelSource>(key.second);
    r.count = a.n;
    r.center_std_px = std::sqrt(a.center / static_cast<double>(a.n));
    r.size_std_px = std::sqrt(a.size / static_cast<double>(a.n));
    r.center_std_m = r.center_std_px / camera_of(set, r.camera).scale;
    rows.push_back(r);
  }
  return rows;
}

CalibrationRow evaluate_calibration(const SampleSet& set, std::size_t manual, double sigma_px,
                                    std::uint64_t seed) {
  const std::vector<LabelRecord> man = manual_labels(set, manual, sigma_px, seed);
  const LabelFits fm = fit_labels(set, man);
  const CalibrationModel calib = calibrate_from_labels(set, man);
  const std::vector<LabelRecord> autos = auto_label(set, man, calib);
  std::vector<LabelRecord> all = man;
  all.insert(all.end(), autos.begin(), autos.end());
  const LabelFits fa = fit_labels(set, all);

  CalibrationRow row;
  row.manual = manual_indices(set.eth.size(), manual).size();
  row.total = set.eth.size();
  row.eth_manual_std_px = fm.eth.pooled_fwd;
  row.eth_all_std_px = fa.eth.pooled_fwd;
  row.jac_manual_std_px = fm.jac.pooled;
  row.jac_all_std_px = fa.jac.pooled;
  row.inv_std_m = fm.eth.pooled_inv;
  row.eth_manual_std_m = row.eth_manual_std_px / set.eth_camera.scale;
  row.eth_all_std_m = row.eth_all_std_px / set.eth_camera.scale;
  for (const QualityRow& q : label_quality_report(set, autos)) {
    row.auto_center_err_px = std::max(row.auto_center_err_px, q.center_std_px);
  }
  row.manual_fraction = static_cast<double>(row.manual) / static_cast<double>(row.total);
  row.pruned_offsets = set.pruned_offsets;
  return row;
}

std::string label_line(const LabelRecord& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f", static_cast<int>(r.cls), r.cx, r.cy,
                r.w, r.h);
  return buf;
}

void write_dataset(const std::filesystem::path& dir, const SampleSet& set,
                   const std::vector<LabelRecord>& labels) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "images", ec);
  fs::create_directories(dir / "labels", ec);
  if (ec) throw IoError("cannot create dataset directory " + dir.string());

  auto stem = [](CameraKind k, std::size_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04zu", k == CameraKind::EyeToHand ? "eth" : "eih", id);
    return std::string(buf);
  };

  std::map<std::pair<int, std::size_t>, std::vector<std::string>> per_image;
  for (const LabelRecord& l : labels) {
    per_image[{static_cast<int>(l.camera), l.image_id}].push_back(label_line(l));
  }
  for (std::size_t id = 0; id < set.eth.size(); ++id) {
    for (CameraKind k : {CameraKind::EyeToHand, CameraKind::EyeInHand}) {
      const Image& img = k == CameraKind::EyeToHand ? set.eth[id].image : set.eih[id].image;
      if (!img.empty()) write_pgm(dir / "images" / (stem(k, id) + ".pgm"), img);
      std::ofstream out(dir / "labels" / (stem(k, id) + ".txt"));
      if (!out) throw IoError("cannot write label file for " + stem(k, id));
      for (const std::string& line : per_image[{static_cast<int>(k), id}]) out << line << '\n';
    }
  }

  std::ofstream man(dir / "manifest.csv");
  if (!man) throw IoError("cannot write manifest");
  man << "image_id,camera,x_r,y_r,dx_r,dy_r,dz_r,seed\n";
  char buf[256];
  for (std::size_t id = 0; id < set.eth.size(); ++id) {
    const EthRecord& e = set.eth[id];
    const EihRecord& h = set.eih[id];
    std::snprintf(buf, sizeof buf, "%zu,eth,%.9f,%.9f,0,0,0,%llu\n", id, e.position.x(),
                  e.position.y(), static_cast<unsigned long long>(e.texture_seed));
    man << buf;
    std::snprintf(buf, sizeof buf, "%zu,eih,%.9f,%.9f,%.9f,%.9f,%.9f,%llu\n", id, e.position.x(),
                  e.position.y(), h.offset.x(), h.offset.y(), h.offset.z(),
                  static_cast<unsigned long long>(h.texture_seed));
    man << buf;
  }
}

}  // namespace cogman
