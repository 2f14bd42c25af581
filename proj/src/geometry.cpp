#include "cogman/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cogman/errors.hpp"

namespace cogman {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Pose Pose::planar(double x, double y, double z, double rz) {
  return Pose{x, y, z, 0.0, 0.0, wrap_angle(rz)};
}

Pose Pose::from_task(const Vec4& v) { return planar(v[0], v[1], v[2], v[3]); }

bool Wrench::finite() const {
  return std::isfinite(fx) && std::isfinite(fy) && std::isfinite(fz) &&
         std::isfinite(tz);
}

Wrench clamp(const Wrench& w, const Wrench& limit) {
  auto c = [](double v, double l) { return std::clamp(v, -std::abs(l), std::abs(l)); };
  return {c(w.fx, limit.fx), c(w.fy, limit.fy), c(w.fz, limit.fz), c(w.tz, limit.tz)};
}

void WorkspaceSpec::validate() const {
  if (!(x_range.lo <= x_range.hi) || !(y_range.lo <= y_range.hi) ||
      !(rz_range.lo <= rz_range.hi)) {
    throw ConfigError("workspace interval has lo > hi");
  }
  if (x_range.contains(home.x) && y_range.contains(home.y)) {
    throw ConfigError("home pose lies inside the workspace x/y region");
  }
}

bool WorkspaceSpec::contains(const Pose& p) const {
  return x_range.contains(p.x) && y_range.contains(p.y) && rz_range.contains(p.rz);
}

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Pose compose(const Pose& a, const Pose& b) {
  const Vec2 t = rotate(b.xy(), a.rz);
  return Pose::planar(a.x + t.x(), a.y + t.y(), a.z + b.z, a.rz + b.rz);
}

Pose inverse(const Pose& p) {
  const Vec2 t = rotate(-p.xy(), -p.rz);
  return Pose::planar(t.x(), t.y(), -p.z, -p.rz);
}

Vec4 task_difference(const Pose& a, const Pose& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z, wrap_angle(a.rz - b.rz)};
}

Pose sample_uniform(const WorkspaceSpec& ws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const Interval& r) { return r.lo + r.width() * uniform01(rng); };
  const double x = draw(ws.x_range);
  const double y = draw(ws.y_range);
  const double rz = draw(ws.rz_range);
  Pose p;
  p.x = x;
  p.y = y;
  p.z = ws.z_con;
  p.rx = ws.rx_con;
  p.ry = ws.ry_con;
  p.rz = rz;
  return p;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace cogman
