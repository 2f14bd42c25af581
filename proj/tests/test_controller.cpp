#include <cmath>
#include <random>

#include "cogman/controller.hpp"
#include "cogman/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cogman;

namespace {

// Closed loop against a perfect velocity follower: X integrates v'.
struct Loop {
  Pose X;
  Vec4 v = Vec4::Zero();
  void tick(const ControlCommand& cmd, const Wrench& F, const GainSet& g) {
    v = admittance_step(cmd, X, F, v, g);
    X = Pose::from_task(X.task() + kControlDt * v);
  }
};

// RK4 on the continuous ODE  M x'' + B x' + K (x - x_d) = 0  for one axis.
std::vector<double> ode_oracle(double k, double m, double b, double x0, double xd, double T,
                               double h) {
  double x = x0, v = 0.0;
  auto acc = [&](double xx, double vv) { return (k * (xd - xx) - b * vv) / m; };
  std::vector<double> out{x};
  const int n = static_cast<int>(std::lround(T / h));
  for (int i = 0; i < n; ++i) {
    const double k1x = v, k1v = acc(x, v);
    const double k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
    const double k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
    const double k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("equilibrium gives zero output") {
  const GainSet g = GainSet::critically_damped({2000, 2000, 2000, 20});
  ControlCommand cmd;
  cmd.X_d = Pose::planar(0.1, 0.2, 0.3, 0.4);
  cmd.F_d = {1, -2, 3, 0.01};
  const Vec4 out = admittance_step(cmd, cmd.X_d, cmd.F_d, Vec4::Zero(), g);
  CHECK(out == Vec4::Zero());
}

TEST_CASE("steady-state offset is F/K") {
  const Vec4 K{800, 2000, 312.5, 20};
  const GainSet g = GainSet::critically_damped(K);
  ControlCommand cmd;
  cmd.X_d = Pose::planar(0.2, 0.1, 0.25, 0.3);
  const Wrench F{3.0, -5.0, 2.0, 0.05};
  Loop loop{cmd.X_d};
  for (int k = 0; k < 120 * 20; ++k) loop.tick(cmd, F, g);
  const Vec4 offset = task_difference(loop.X, cmd.X_d);
  for (int i = 0; i < 4; ++i) {
    const double expect = F.vec()[i] / K[i];
    CHECK(std::abs(offset[i] - expect) <= 0.01 * std::abs(expect));
  }
}

TEST_CASE("critically damped step response") {
  const Vec4 K{2000, 500, 5000, 20};
  const GainSet g = GainSet::critically_damped(K);
  CHECK((g.damping_ratio() - Vec4::Ones()).cwiseAbs().maxCoeff() < 1e-12);
  ControlCommand cmd;
  cmd.X_d = Pose::planar(0.01, -0.01, 0.01, 0.1);
  Loop loop;
  const Vec4 step = cmd.X_d.task();
  Vec4 peak = Vec4::Zero();
  std::vector<Vec4> trace{Vec4::Zero()};
  const double T = 2.0;
  for (int k = 0; k < static_cast<int>(T * 120); ++k) {
    loop.tick(cmd, {}, g);
    trace.push_back(loop.X.task());
    for (int i = 0; i < 4; ++i) peak[i] = std::max(peak[i], loop.X.task()[i] / step[i]);
  }
  for (int i = 0; i < 4; ++i) {
    CHECK(peak[i] <= 1.01);
    CHECK(std::abs(loop.X.task()[i] / step[i] - 1.0) < 0.01);
    // The continuous system integrated ten times finer does not overshoot
    // either, and the discrete loop lags it only slightly.
    const auto ref = ode_oracle(K[i], g.M[i], g.B[i], 0.0, step[i], T, kControlDt / 10);
    double ref_peak = 0.0, gap = 0.0;
    for (std::size_t n = 0; n < trace.size(); ++n) {
      const double r = ref[n * 10] / step[i];
      ref_peak = std::max(ref_peak, r);
      gap = std::max(gap, std::abs(r - trace[n][i] / step[i]));
    }
    CHECK(ref_peak <= 1.01);
    CHECK(gap < 0.15);
  }
}

TEST_CASE("energy never increases without external force") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> logk(std::log(50.0), std::log(20000.0));
  std::uniform_real_distribution<double> u(-1.0, 1.0), zeta(0.7, 2.0);
  int violations = 0;
  for (int run = 0; run < 1000; ++run) {
    Vec4 K, M;
    for (int i = 0; i < 4; ++i) K[i] = std::exp(logk(rng));
    M = GainSet::default_inertia();
    const GainSet g = GainSet::critically_damped(K, M, zeta(rng));
    ControlCommand cmd;
    cmd.X_d = Pose::planar(0.01 * u(rng), 0.01 * u(rng), 0.01 * u(rng), 0.2 * u(rng));
    Loop loop;
    loop.v = Vec4(0.05 * u(rng), 0.05 * u(rng), 0.05 * u(rng), 0.5 * u(rng));
    auto energy = [&] {
      const Vec4 e = task_difference(cmd.X_d, loop.X);
      return 0.5 * (loop.v.cwiseProduct(M).dot(loop.v) + e.cwiseProduct(K).dot(e));
    };
    double V = energy();
    for (int k = 0; k < 240; ++k) {
      loop.tick(cmd, {}, g);
      const double Vn = energy();
      if (Vn > V + 1e-9) ++violations;
      V = Vn;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("stiffness homogeneity of the elastic term") {
  const Vec4 K{1024, 2048, 512, 16};
  const Vec4 e{0.0625, -0.125, 0.03125, 0.5};
  CHECK((2.0 * K).cwiseProduct(0.5 * e) == K.cwiseProduct(e));
  // Same through the controller: v' from an elastic-only step scales with K e.
  const GainSet a(K, Vec4::Ones(), Vec4::Constant(200.0));
  ControlCommand cmd;
  cmd.X_d = Pose::from_task(e);
  const Vec4 va = admittance_step(cmd, Pose{}, {}, Vec4::Zero(), a);
  for (int i = 0; i < 4; ++i) {
    const double den = 1.0 + kControlDt * 200.0 + kControlDt * kControlDt * K[i];
    CHECK(va[i] == doctest::Approx(kControlDt * K[i] * e[i] / den).epsilon(1e-14));
  }
}

TEST_CASE("rate contract and validation") {
  CHECK(kTicksPerPolicyStep == 24);
  CHECK(kPolicyDt == doctest::Approx(0.2));
  CHECK(1.0 / kControlDt == doctest::Approx(120.0));
  CHECK_THROWS_AS(GainSet({100, 100, 100, 1}, Vec4::Ones(), Vec4::Constant(1.0)), ConfigError);
  CHECK_THROWS_AS(GainSet({-1, 100, 100, 1}, Vec4::Ones(), Vec4::Constant(100.0)), ConfigError);
  CHECK_NOTHROW(GainSet::critically_damped({100, 100, 100, 1}, Vec4::Ones(), 0.7));
  const GainSet g = GainSet::critically_damped({100, 100, 100, 1});
  ControlCommand cmd;
  CHECK_THROWS_AS(admittance_step(cmd, Pose{}, {NAN, 0, 0, 0}, Vec4::Zero(), g), NumericalError);
  CHECK_THROWS_AS(admittance_step(cmd, Pose{}, {}, Vec4::Zero(), g, 0.0), OutOfRange);
}

TEST_CASE("trajectory segments follow min-jerk") {
  TrajectorySegment seg{Pose::planar(0, 0, 0, 0), Pose::planar(0.1, 0.2, -0.05, 0.4), 2.0, 0.5};
  CHECK(testutil::pose_gap(seg.at(-1.0), seg.start) < 1e-15);
  CHECK(testutil::pose_gap(seg.at(10.0), seg.goal) < 1e-15);
  const Pose mid = seg.at(0.5);
  CHECK(mid.x == doctest::Approx(0.05));
  CHECK(mid.rz == doctest::Approx(0.2));
}
