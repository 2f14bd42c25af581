#include <cmath>
#include <filesystem>
#include <random>

#include "cogman/calibration_model.hpp"
#include "cogman/errors.hpp"
#include "cogman/image.hpp"
#include "cogman/planner.hpp"
#include "cogman/vision.hpp"
#include "cogman/world.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cogman;

namespace {

const TaskGeometry kGeom;
const WorkspaceSpec kWs;

WorldState board_at(const Pose& board, const Pose& ee = kWs.home) {
  return World().make_state(ee, board);
}

Vec2 board_point_px(const CameraModel& cam, const Pose& board, double bx, double by) {
  const Pose p = compose(board, Pose::planar(bx, by, 0.0, 0.0));
  return project(cam, Pose{}, {p.x, p.y, p.z});
}

float pixel_at(const Image& img, const Vec2& px) {
  return img.at(static_cast<int>(std::floor(px.x())), static_cast<int>(std::floor(px.y())));
}

// EE at the bottleneck above the hole, shifted by `offset` in the board frame.
WorldState at_bottleneck(const Pose& board, const Vec3& offset) {
  const OecModel oec = OecModel::from_geometry(kGeom, kWs.home);
  const Pose bn = compose(board, oec.bottleneck);
  const Pose ee = compose(bn, Pose::planar(offset.x(), offset.y(), offset.z(), 0.0));
  return board_at(board, ee);
}

}  // namespace

TEST_CASE("camera coverage") {
  const CameraModel eth = CameraModel::eye_to_hand();
  const double reach = kGeom.board_half_extents.norm();
  for (double x : {kWs.x_range.lo - reach, kWs.x_range.hi + reach}) {
    for (double y : {kWs.y_range.lo - reach, kWs.y_range.hi + reach}) {
      const Vec2 px = project(eth, Pose{}, {x, y, 0.0});
      CHECK(px.x() >= 0.0);
      CHECK(px.y() >= 0.0);
      CHECK(px.x() <= eth.width);
      CHECK(px.y() <= eth.height);
    }
  }
  // Eye-in-hand field of view at the board top from the bottleneck vs 4x W.
  const CameraModel eih = CameraModel::eye_in_hand();
  const double fov = eih.width / eih.scale;
  const SkillGraphSpec spec;
  CHECK(fov >= 4.0 * spec.E_r.head<2>().maxCoeff());
}

TEST_CASE("render contract") {
  const CameraModel eth = CameraModel::eye_to_hand();
  Scene empty;
  empty.board_present = false;
  const Image a = render(board_at(Pose::planar(0.1, 0.1, 0, 0)), eth, kGeom, empty);
  const Image b = render(board_at(Pose::planar(0.3, 0.2, 0, 1)), eth, kGeom, empty);
  CHECK(a.pixels == b.pixels);
  const Image with_board = render(board_at(Pose::planar(0.1, 0.1, 0, 0)), eth, kGeom);
  CHECK(with_board.pixels != a.pixels);

  const Pose centered = Pose::planar(0.175, 0.175, 0.0, 0.0);
  const Image img = render(board_at(centered), eth, kGeom);
  const Vec2 hole_px = board_point_px(eth, centered, kGeom.hole_center_in_board.x(),
                                      kGeom.hole_center_in_board.y());
  const Vec2 plain_px = board_point_px(eth, centered, -0.03, 0.02);
  CHECK(pixel_at(img, hole_px) < pixel_at(img, plain_px));

  CHECK(render(board_at(centered), eth, kGeom).pixels == img.pixels);
}

TEST_CASE("render matches the serial reference bit for bit") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 6; ++i) {
    const Pose board = sample_uniform(kWs, rng());
    Scene scene;
    scene.texture_seed = rng();
    const WorldState eth_state = board_at(board);
    const WorldState eih_state = at_bottleneck(board, {0.001, -0.0005, 0.002});
    const CameraModel eth = CameraModel::eye_to_hand(), eih = CameraModel::eye_in_hand();
    CHECK(render(eth_state, eth, kGeom, scene).pixels ==
          render_serial(eth_state, eth, kGeom, scene).pixels);
    CHECK(render(eih_state, eih, kGeom, scene).pixels ==
          render_serial(eih_state, eih, kGeom, scene).pixels);
  }
}

TEST_CASE("noise-free detections equal projections") {
  const CameraModel eth = CameraModel::eye_to_hand();
  const Pose board = Pose::planar(0.2, 0.1, 0.0, 0.3);
  const auto dets = detect(board_at(board), eth, kGeom, {}, 5);
  REQUIRE(dets.size() >= 3);
  const auto b = find(dets, ObjectClass::Board);
  REQUIRE(b);
  CHECK((b->center() - project(eth, Pose{}, {board.x, board.y, 0.0})).norm() < 1e-9);
  const auto f1 = find(dets, ObjectClass::Feature1);
  REQUIRE(f1);
  const Vec2 fp = kGeom.feature_points[0];
  CHECK((f1->center() - board_point_px(eth, board, fp.x(), fp.y())).norm() < 1e-9);
  for (const Detection& d : dets) CHECK(d.confidence == 1.0);
}

TEST_CASE("arm over the board lowers confidence") {
  const CameraModel eth = CameraModel::eye_to_hand();
  DetectorNoise noise;
  noise.occlusion_conf_floor = 0.1;
  const Pose board = Pose::planar(0.2, 0.15, 0.0, 0.2);
  const Pose ee = Pose::planar(board.x, board.y, 0.2, 0.0);
  const auto dets = detect(board_at(board, ee), eth, kGeom, noise, 3);
  const auto b = find(dets, ObjectClass::Board);
  REQUIRE(b);
  CHECK(b->confidence <= noise.occlusion_conf_floor);
  CHECK_THROWS_AS(estimate_board_pose(dets, ideal_eye_to_hand_calibration(eth), kWs),
                  LowConfidence);
}

TEST_CASE("injected center noise has the configured spread") {
  const CameraModel eth = CameraModel::eye_to_hand();
  DetectorNoise noise;
  noise.sigma_center = 1.0;
  const WorldState s = board_at(Pose::planar(0.2, 0.2, 0.0, 0.1));
  const Vec2 truth = find(detect(s, eth, kGeom, {}, 0), ObjectClass::Board)->center();
  double sx = 0, sxx = 0, sy = 0, syy = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Vec2 c = find(detect(s, eth, kGeom, noise, derive_seed(77, i)), ObjectClass::Board)->center();
    const Vec2 d = c - truth;
    sx += d.x();
    sxx += d.x() * d.x();
    sy += d.y();
    syy += d.y() * d.y();
  }
  const double stdx = std::sqrt(sxx / n - (sx / n) * (sx / n));
  const double stdy = std::sqrt(syy / n - (sy / n) * (sy / n));
  CHECK(std::abs(stdx - 1.0) < 0.05);
  CHECK(std::abs(stdy - 1.0) < 0.05);
}

TEST_CASE("board pose estimate") {
  const CameraModel eth = CameraModel::eye_to_hand();
  const CalibrationModel calib = ideal_eye_to_hand_calibration(eth);
  const Pose board = Pose::planar(0.2, 0.1, 0.0, 0.3);
  const Pose est = estimate_board_pose(detect(board_at(board), eth, kGeom, {}, 1), calib, kWs);
  CHECK(std::abs(est.x - 0.2) < 1e-9);
  CHECK(std::abs(est.y - 0.1) < 1e-9);
  CHECK(est.z == kWs.z_con);
  CHECK(est.rx == 0.0);
  CHECK(est.ry == 0.0);
  CHECK(std::abs(est.rz - 0.3) < 1e-9);

  SUBCASE("all quadrants") {
    for (int k = 0; k < 36; ++k) {
      const double yaw = wrap_angle(-kPi + (k + 0.5) * 2.0 * kPi / 36.0);
      const Pose b = Pose::planar(0.175, 0.175, 0.0, yaw);
      auto dets = detect(board_at(b), eth, kGeom, {}, 1);
      const Pose e = estimate_board_pose(dets, calib, kWs);
      CHECK(std::abs(wrap_angle(e.rz - yaw)) < 1e-9);
      for (Detection& d : dets) {
        if (d.cls == ObjectClass::Feature1) d.cls = ObjectClass::Feature2;
        else if (d.cls == ObjectClass::Feature2) d.cls = ObjectClass::Feature1;
      }
      const Pose swapped = estimate_board_pose(dets, calib, kWs);
      CHECK(std::abs(wrap_angle(swapped.rz - yaw - kPi)) < 1e-9);
    }
  }
  SUBCASE("missing classes") {
    auto dets = detect(board_at(board), eth, kGeom, {}, 1);
    std::erase_if(dets, [](const Detection& d) { return d.cls == ObjectClass::Board; });
    try {
      estimate_board_pose(dets, calib, kWs);
      FAIL("expected MissingDetection");
    } catch (const MissingDetection& e) {
      CHECK(e.which() == "board");
    }
    CHECK_THROWS_AS(estimate_board_pose(detect(board_at(board), eth, kGeom, {}, 1),
                                        CalibrationModel{}, kWs),
                    MissingCalibration);
  }
}

TEST_CASE("noise-free round trip over random boards") {
  const CameraModel eth = CameraModel::eye_to_hand();
  const CalibrationModel calib = ideal_eye_to_hand_calibration(eth);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Pose board = sample_uniform(kWs, derive_seed(3, s));
    const Pose est = estimate_board_pose(detect(board_at(board), eth, kGeom, {}, s), calib, kWs);
    CHECK((est.xy() - board.xy()).norm() < 1e-9);
    CHECK(std::abs(wrap_angle(est.rz - board.rz)) < 1e-9);
  }
}

TEST_CASE("pose error grows with detector noise") {
  const CameraModel eth = CameraModel::eye_to_hand();
  const CalibrationModel calib = ideal_eye_to_hand_calibration(eth);
  const Pose board = Pose::planar(0.15, 0.2, 0.0, -0.2);
  const WorldState s = board_at(board);
  double prev = -1.0;
  for (double sigma : {0.0, 0.5, 1.0, 2.0}) {
    DetectorNoise noise;
    noise.sigma_center = sigma;
    noise.sigma_size = sigma;
    double sq = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Pose e = estimate_board_pose(detect(s, eth, kGeom, noise, derive_seed(8, i)), calib, kWs);
      sq += (e.xy() - board.xy()).squaredNorm();
    }
    const double rmse = std::sqrt(sq / 1000);
    CHECK(rmse >= prev);
    prev = rmse;
  }
}

TEST_CASE("attention crop") {
  SUBCASE("full box is a resized copy") {
    Image img(8, 8);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) img.at(x, y) = static_cast<float>((x * 7 + y * 3) % 11) / 10.0f;
    const Detection full{ObjectClass::Hole, 4.0, 4.0, 8.0, 8.0, 1.0};
    CHECK(crop_attention(img, full, 8, 8).pixels == img.pixels);
    const Image half = crop_attention(img, full, 4, 4);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        const double mean = (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                             img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1)) / 4.0;
        CHECK(half.at(x, y) == doctest::Approx(mean).epsilon(1e-6));
      }
    }
  }
  SUBCASE("constant image") {
    const Image img(64, 64, 0.37f);
    const Image c = crop_attention(img, {ObjectClass::Hole, 20.3, 41.7, 13.1, 9.4, 1.0}, 16, 16);
    for (float v : c.pixels) CHECK(v == doctest::Approx(0.37f).epsilon(1e-6));
  }
  SUBCASE("degenerate box") {
    const Image img(64, 64, 0.5f);
    CHECK_THROWS_AS(crop_attention(img, {ObjectClass::Hole, 10, 10, 1.5, 5, 1}, 16, 16), DegenerateBox);
  }
  SUBCASE("hole is centered in a noise-free crop") {
    const CameraModel eih = CameraModel::eye_in_hand();
    const Pose board = Pose::planar(0.17, 0.16, 0.0, 0.4);
    for (const Vec3& off : {Vec3(0, 0, 0), Vec3(0.0015, -0.001, 0.0), Vec3(-0.002, 0.0005, 0.001)}) {
      const WorldState s = at_bottleneck(board, off);
      const Image img = render(s, eih, kGeom);
      const auto hole = find(detect(s, eih, kGeom, {}, 1), ObjectClass::Hole);
      REQUIRE(hole);
      // The hole center projects to the box center; map it into crop pixels.
      const Pose h = hole_pose(board, kGeom);
      const Vec2 c = project(eih, s.ee_pose, {h.x, h.y, h.z});
      const Vec2 in_crop{(c.x() - (hole->cx - hole->w / 2)) * 16.0 / hole->w,
                         (c.y() - (hole->cy - hole->h / 2)) * 16.0 / hole->h};
      CHECK((in_crop - Vec2(8.0, 8.0)).norm() < 1.0);
      const Image crop = crop_attention(img, *hole, 16, 16);
      CHECK(crop.width == 16);
    }
  }
}

TEST_CASE("noisy hole boxes still contain the hole center") {
  const CameraModel eih = CameraModel::eye_in_hand();
  DetectorNoise noise{0.25, 0.25, 0.0, 0.0};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.002, 0.002);
  for (int i = 0; i < 500; ++i) {
    const Pose board = sample_uniform(kWs, rng());
    const WorldState s = at_bottleneck(board, {u(rng), u(rng), std::abs(u(rng))});
    const auto hole = find(detect(s, eih, kGeom, noise, rng()), ObjectClass::Hole);
    REQUIRE(hole);
    const Pose h = hole_pose(board, kGeom);
    const Vec2 c = project(eih, s.ee_pose, {h.x, h.y, h.z});
    CHECK(std::abs(c.x() - hole->cx) < hole->w / 2);
    CHECK(std::abs(c.y() - hole->cy) < hole->h / 2);
  }
}

TEST_CASE("pgm round trip") {
  Image img(5, 3);
  for (std::size_t k = 0; k < img.size(); ++k) img.pixels[k] = static_cast<float>(k) / 14.0f;
  const auto path = std::filesystem::temp_directory_path() / "cogman_test_roundtrip.pgm";
  write_pgm(path, img);
  const Image back = read_pgm(path);
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  for (std::size_t k = 0; k < img.size(); ++k) {
    CHECK(std::abs(back.pixels[k] - img.pixels[k]) <= 0.5f / 255.0f + 1e-6f);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_pgm(path), IoError);
}
