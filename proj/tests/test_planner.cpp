#include <cmath>
#include <random>

#include "cogman/classroom.hpp"
#include "cogman/errors.hpp"
#include "cogman/executor.hpp"
#include "cogman/min_jerk.hpp"
#include "cogman/planner.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cogman;
using testutil::pose_gap;

namespace {

const TaskGeometry kGeom;

SkillGraphSpec make_spec() {
  SkillGraphSpec s;
  s.oec = OecModel::from_geometry(kGeom, s.workspace.home);
  return s;
}

CoarsePolicy default_plan(const Pose& board, const Vec4& E_r = {0.002, 0.002, 0.002, 0.05}) {
  const SkillGraphSpec s = make_spec();
  return plan_coarse(s.oec, board, E_r, s.F_max, s.T_cf, s.T_cr, s.K_cf);
}

// Second-order accurate central differences, Richardson-extrapolated. s is a
// quintic, so both results are exact up to rounding in long double.
long double s_ld(long double t) { return t * t * t * (10 - 15 * t + 6 * t * t); }

long double d1(long double t, long double h) {
  auto c = [&](long double hh) { return (s_ld(t + hh) - s_ld(t - hh)) / (2 * hh); };
  const long double a = c(h), b = c(h / 2);
  return (4 * b - a) / 3;
}

long double d2(long double t, long double h) {
  auto c = [&](long double hh) { return (s_ld(t + hh) - 2 * s_ld(t) + s_ld(t - hh)) / (hh * hh); };
  const long double a = c(h), b = c(h / 2);
  return (4 * b - a) / 3;
}

}  // namespace

TEST_CASE("demonstration retargeting") {
  const World world;
  const Pose key_b = Pose::planar(0.22, 0.19, 0.14, 0.3);
  const Pose key_g = Pose::planar(0.22, 0.19, 0.11, 0.3);
  const Pose home = Pose::planar(-0.12, 0.175, 0.25, 0);

  const std::vector<WorldState> ident{world.make_state(home, Pose{}), world.make_state(key_b, Pose{}),
                                      world.make_state(key_g, Pose{})};
  const OecModel m = record_demo(ident, 1, 2);
  CHECK(pose_gap(m.bottleneck, key_b) < 1e-15);
  CHECK(pose_gap(m.goal, key_g) < 1e-15);
  CHECK(pose_gap(m.home, home) == 0.0);

  const Pose board = Pose::planar(0.1, 0.2, 0.0, kPi / 4);
  const std::vector<WorldState> moved{world.make_state(home, board),
                                      world.make_state(compose(board, key_b), board),
                                      world.make_state(compose(board, key_g), board)};
  const OecModel r = record_demo(moved, 1, 2);
  CHECK(pose_gap(compose(board, r.bottleneck), compose(board, key_b)) < 1e-9);
  CHECK(pose_gap(r.bottleneck, m.bottleneck) < 1e-9);
  CHECK(pose_gap(r.goal, m.goal) < 1e-9);
  CHECK_THROWS_AS(record_demo(moved, 1, 5), OutOfRange);
}

TEST_CASE("min-jerk profile") {
  CHECK(min_jerk_profile(0.0) == 0.0);
  CHECK(min_jerk_profile(1.0) == 1.0);
  CHECK(min_jerk_profile(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (long double t : {0.0L, 1.0L}) {
    CHECK(std::abs(static_cast<double>(d1(t, 1e-3L))) < 1e-9);
    CHECK(std::abs(static_cast<double>(d2(t, 1e-2L))) < 1e-9);
  }
  // The library profile agrees with the polynomial everywhere.
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    CHECK(std::abs(min_jerk_profile(t) - static_cast<double>(s_ld(t))) < 1e-15);
  }
  const Pose a = Pose::planar(0, 0, 0.25, 3.0), b = Pose::planar(0.1, -0.2, 0.05, -3.0);
  CHECK(pose_gap(min_jerk(a, b, 2.0, 0.0), a) == 0.0);
  CHECK(pose_gap(min_jerk(a, b, 2.0, 2.0), b) < 1e-15);
  const Pose mid = min_jerk(a, b, 2.0, 1.0);
  CHECK(mid.x == doctest::Approx(0.05));
  // Yaw takes the short way across +-pi.
  CHECK(std::abs(mid.rz) > 3.0);
  CHECK_THROWS_AS(min_jerk(a, b, 2.0, 2.5), OutOfRange);
}

TEST_CASE("coarse plan") {
  const CoarsePolicy p = default_plan(Pose::planar(0.175, 0.175, 0.0, 0.0));
  CHECK(std::abs(p.bottleneck.z - p.goal.z) == doctest::Approx(0.030).epsilon(1e-12));
  CHECK(p.W[2] == doctest::Approx(0.032).epsilon(1e-12));
  CHECK(p.K_cr[2] == doctest::Approx(312.5).epsilon(1e-12));
  CHECK(p.W[0] == doctest::Approx(0.002).epsilon(1e-12));

  const SkillGraphSpec s = make_spec();
  OecModel flat = s.oec;
  flat.goal = flat.bottleneck;
  CHECK_THROWS_AS(plan_coarse(flat, Pose{}, Vec4::Zero(), s.F_max, 3, 6, s.K_cf), ZeroExplorationSpace);
}

TEST_CASE("frame covariance") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Pose board = testutil::random_pose(rng, 0.2);
    const Pose g = testutil::random_pose(rng, 0.2);
    const CoarsePolicy a = default_plan(board), b = default_plan(compose(g, board));
    CHECK(pose_gap(b.goal, compose(g, a.goal)) < 1e-9);
    CHECK(pose_gap(b.bottleneck, compose(g, a.bottleneck)) < 1e-9);
    CHECK((b.W - a.W).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((b.K_cr - a.K_cr).cwiseAbs().maxCoeff() < 1e-6);
  }
  const Pose board = Pose::planar(0.175, 0.175, 0.0, 0.0);
  const CoarsePolicy a = default_plan(board);
  const CoarsePolicy r = default_plan(compose(Pose::planar(0, 0, 0, kPi / 2), board));
  CHECK(std::abs(wrap_angle(r.goal.rz - a.goal.rz - kPi / 2)) < 1e-9);
}

TEST_CASE("K_cr times W equals F_max") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> e(1e-4, 0.02), f(0.5, 50.0);
  const SkillGraphSpec s = make_spec();
  for (int i = 0; i < 1000; ++i) {
    const Wrench F{f(rng), f(rng), f(rng), 0.01 * f(rng)};
    const Vec4 E{e(rng), e(rng), e(rng), 10 * e(rng)};
    const CoarsePolicy p =
        plan_coarse(s.oec, testutil::random_pose(rng, 0.3), E, F, s.T_cf, s.T_cr, s.K_cf);
    const Vec4 prod = p.K_cr.cwiseProduct(p.W);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(prod[k] - F.vec()[k]) <= 1e-12 * F.vec()[k]);
  }
}

TEST_CASE("skill graph guards") {
  const SkillGraphSpec spec = make_spec();
  const World world;
  const Pose board = Pose::planar(0.175, 0.175, 0.0, 0.1);
  const WorldState at_home = world.make_state(spec.workspace.home, board);

  SUBCASE("start holds home") {
    SkillContext ctx;
    const SkillStep st = skill_step(spec, ctx, at_home, {}, 0.0);
    CHECK(st.next == Stage::GlobalPerceive);
    CHECK(pose_gap(st.cmd.X_d, spec.workspace.home) == 0.0);
    CHECK(st.cmd.F_d.vec() == Vec4::Zero());
    CHECK_FALSE(st.residual_enabled);
  }
  SUBCASE("perception timeout faults") {
    SkillContext ctx;
    SkillStep st;
    for (int k = 0; k <= spec.perceive_timeout; ++k) {
      st = skill_step(spec, ctx, at_home, {std::nullopt, "missing detection: board"}, 0.2 * k);
    }
    CHECK(st.next == Stage::Fault);
    REQUIRE(st.fault);
    CHECK(st.fault->stage == Stage::GlobalPerceive);
    CHECK(st.fault->reason == "missing detection: board");
  }
  SUBCASE("bottleneck reached switches in one step") {
    SkillContext ctx;
    skill_step(spec, ctx, at_home, {board, ""}, 0.0);
    CHECK(ctx.stage == Stage::Plan);
    skill_step(spec, ctx, at_home, {board, ""}, 0.2);
    CHECK(ctx.stage == Stage::CoarseMove);
    REQUIRE(ctx.plan);
    const Pose near = compose(ctx.plan->bottleneck, Pose::planar(0.0005, -0.0005, 0.0005, 0.01));
    const SkillStep st = skill_step(spec, ctx, world.make_state(near, board), {board, ""}, 0.4);
    CHECK(st.next == Stage::FineManip);
    CHECK(st.residual_enabled);
    CHECK(st.cmd.K == ctx.plan->K_cr);
  }
  SUBCASE("episode cap faults in FineManip") {
    const CoarsePolicy plan = default_plan(board);
    SkillContext ctx = fine_manip_context(plan);
    const WorldState hover = world.make_state(plan.bottleneck, board);
    SkillStep st;
    int n = 0;
    while (ctx.stage == Stage::FineManip && n < 1000) {
      st = skill_step(spec, ctx, hover, {}, 0.2 * n++);
    }
    CHECK(n == spec.episode_cap + 1);
    CHECK(st.next == Stage::Fault);
    REQUIRE(st.fault);
    CHECK(st.fault->stage == Stage::FineManip);
    CHECK(st.fault->reason == "timeout");
  }
  SUBCASE("success needs position and force") {
    const CoarsePolicy plan = default_plan(board);
    SkillContext ctx = fine_manip_context(plan);
    WorldState s = world.make_state(plan.goal, board);
    s.contact_wrench.fz = 4.0;
    CHECK(skill_step(spec, ctx, s, {}, 0.0).next == Stage::FineManip);
    s.contact_wrench.fz = 5.0;
    CHECK(skill_step(spec, ctx, s, {}, 0.2).next == Stage::Done);
    CHECK(skill_step(spec, ctx, s, {}, 0.4).next == Stage::Done);
  }
}

TEST_CASE("stages advance monotonically through a full episode") {
  const SkillGraphSpec spec = make_spec();
  const World world;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    WorldState s = world.place_board(spec.workspace, seed);
    SkillContext ctx;
    Vec4 v = Vec4::Zero();
    Stage prev = ctx.stage;
    std::vector<Stage> seen{prev};
    for (int k = 0; k < 200 && ctx.stage != Stage::Done && ctx.stage != Stage::Fault; ++k) {
      const SkillStep st = skill_step(spec, ctx, s, {s.board_pose, ""}, k * kPolicyDt);
      const int a = static_cast<int>(prev), b = static_cast<int>(st.next);
      CHECK(b >= a);
      if (st.next != Stage::Fault) CHECK(b - a <= 1);
      if (st.next != prev) seen.push_back(st.next);
      prev = st.next;
      const TickSummary t = execute(world, s, v, st.cmd);
      s = t.state;
      v = t.v;
    }
    CHECK(seen.size() >= 4);
    CHECK(seen[3] == Stage::FineManip);
  }
}

TEST_CASE("residual force stays within the safety envelope") {
  const CoarsePolicy plan = default_plan(Pose::planar(0.2, 0.1, 0.0, 0.4));
  SkillContext ctx = fine_manip_context(plan);
  const World world;
  const SkillStep st =
      skill_step(make_spec(), ctx, world.make_state(plan.bottleneck, Pose{}), {}, 0.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Vec4 fmax = plan.F_max.vec().cwiseAbs();
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> a{u(rng), u(rng), u(rng), u(rng)};
    const ControlCommand c = combine(st.cmd, a, plan.F_max, plan.goal.rz);
    const Vec4 total = c.F_d.vec().cwiseAbs() + c.K.cwiseProduct(plan.W);
    for (int k = 0; k < 4; ++k) CHECK(total[k] <= 2.0 * fmax[k] + 1e-12);
  }
}
