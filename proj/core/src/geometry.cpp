#include "sensorvis/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sensorvis/error.hpp"

namespace sensorvis {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Vec2 OrientedRect::axis_u() const { return {std::cos(yaw), std::sin(yaw)}; }
Vec2 OrientedRect::axis_v() const { return {-std::sin(yaw), std::cos(yaw)}; }

std::array<Vec2, 4> OrientedRect::corners() const {
  const Vec2 u = axis_u() * (length / 2.0);
  const Vec2 v = axis_v() * (width / 2.0);
  return {center + u + v, center - u + v, center - u - v, center + u - v};
}

bool OrientedRect::contains(const Vec2& p) const {
  const Vec2 d = p - center;
  return std::abs(d.dot(axis_u())) < length / 2.0 &&
         std::abs(d.dot(axis_v())) < width / 2.0;
}

double OrientedRect::distance(const Vec2& p) const {
  const Vec2 d = p - center;
  const double du = std::max(std::abs(d.dot(axis_u())) - length / 2.0, 0.0);
  const double dv = std::max(std::abs(d.dot(axis_v())) - width / 2.0, 0.0);
  return std::hypot(du, dv);
}

double OrientedRect::distance(const Vec2& a, const Vec2& b) const {
  // Local frame, where the rectangle is [-l/2, l/2] x [-w/2, w/2].
  const Vec2 u = axis_u();
  const Vec2 v = axis_v();
  const Vec2 la((a - center).dot(u), (a - center).dot(v));
  const Vec2 lb((b - center).dot(u), (b - center).dot(v));
  const Vec2 half(length / 2.0, width / 2.0);
  double t0 = 0.0;
  double t1 = 1.0;
  bool crosses = true;
  for (int k = 0; k < 2 && crosses; ++k) {
    const double d = lb[k] - la[k];
    if (d == 0.0) {
      crosses = std::abs(la[k]) <= half[k];
      continue;
    }
    double e0 = (-half[k] - la[k]) / d;
    double e1 = (half[k] - la[k]) / d;
    if (e0 > e1) std::swap(e0, e1);
    t0 = std::max(t0, e0);
    t1 = std::min(t1, e1);
    crosses = t0 <= t1;
  }
  if (crosses) return 0.0;
  // Disjoint convex sets: the closest pair involves an endpoint or a corner.
  double best = std::min(distance(a), distance(b));
  const Vec2 ab = b - a;
  const double n2 = ab.squaredNorm();
  for (const Vec2& c : corners()) {
    const double t = n2 > 0.0 ? std::clamp((c - a).dot(ab) / n2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + t * ab - c).norm());
  }
  return best;
}

Vec3 OrientedBox::center() const {
  return {footprint.center.x(), footprint.center.y(), base_z + height / 2.0};
}

bool OrientedBox::contains(const Vec3& p) const {
  return p.z() > base_z && p.z() < top_z() &&
         footprint.contains(Vec2(p.x(), p.y()));
}

std::array<Vec3, 8> OrientedBox::corners() const {
  std::array<Vec3, 8> out;
  const auto fp = footprint.corners();
  for (int i = 0; i < 4; ++i) {
    out[i] = Vec3(fp[i].x(), fp[i].y(), base_z);
    out[i + 4] = Vec3(fp[i].x(), fp[i].y(), top_z());
  }
  return out;
}

OrientedBox OrientedBox::dilated(double margin) const {
  OrientedBox b = *this;
  b.footprint.length += 2.0 * margin;
  b.footprint.width += 2.0 * margin;
  b.height += margin;
  return b;
}

namespace {

// Slab clipping in the box frame. Returns the parameter interval of
// origin + t * dir inside the box, intersected with [t_lo, t_hi].
std::optional<std::array<double, 2>> clip_to_box(const Vec3& origin,
                                                 const Vec3& dir,
                                                 const OrientedBox& box,
                                                 double t_lo, double t_hi) {
  const Vec2 u = box.footprint.axis_u();
  const Vec2 v = box.footprint.axis_v();
  const Vec2 rel(origin.x() - box.footprint.center.x(),
                 origin.y() - box.footprint.center.y());
  const double o[3] = {rel.dot(u), rel.dot(v),
                       origin.z() - (box.base_z + box.height / 2.0)};
  const Vec2 dxy(dir.x(), dir.y());
  const double d[3] = {dxy.dot(u), dxy.dot(v), dir.z()};
  const double half[3] = {box.footprint.length / 2.0,
                          box.footprint.width / 2.0, box.height / 2.0};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] <= -half[k] || o[k] >= half[k]) return std::nullopt;
      continue;
    }
    double t0 = (-half[k] - o[k]) / d[k];
    double t1 = (half[k] - o[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::max(t_lo, t0);
    t_hi = std::min(t_hi, t1);
    if (t_lo >= t_hi) return std::nullopt;
  }
  return std::array<double, 2>{t_lo, t_hi};
}

}  // namespace

std::optional<std::array<double, 2>> segment_box_overlap(const Vec3& a,
                                                         const Vec3& b,
                                                         const OrientedBox& box) {
  return clip_to_box(a, b - a, box, 0.0, 1.0);
}

bool segment_blocked(const Vec3& a, const Vec3& b, const OrientedBox& box,
                     double min_length) {
  const auto overlap = segment_box_overlap(a, b, box);
  if (!overlap) return false;
  return ((*overlap)[1] - (*overlap)[0]) * (b - a).norm() > min_length;
}

std::optional<std::array<double, 2>> ray_box_overlap(const Vec3& origin,
                                                     const Vec3& dir,
                                                     const OrientedBox& box) {
  return clip_to_box(origin, dir, box, 0.0,
                     std::numeric_limits<double>::infinity());
}

void FovSpec::validate() const {
  if (!(max_range > 0.0)) {
    throw Error("geometry", ErrorKind::kInvalidArgument,
                "fov max_range must be positive");
  }
  if (!(azimuth_half_angle > 0.0 && azimuth_half_angle <= kPi)) {
    throw Error("geometry", ErrorKind::kInvalidArgument,
                "fov azimuth_half_angle must lie in (0, pi]");
  }
  if (!(elevation_min < elevation_max)) {
    throw Error("geometry", ErrorKind::kInvalidArgument,
                "fov elevation bounds are not ordered");
  }
}

void SensorPose::validate() const {
  if (!(z >= 0.0)) {
    throw Error("geometry", ErrorKind::kInvalidArgument,
                "sensor height must be non-negative");
  }
  fov.validate();
}

SphericalCoord to_sensor_spherical(const SensorPose& sensor, const Vec3& p) {
  const Vec3 d = p - sensor.position();
  const double ground = std::hypot(d.x(), d.y());
  SphericalCoord s;
  s.range = d.norm();
  s.azimuth = wrap_angle(std::atan2(d.y(), d.x()) - sensor.yaw);
  s.elevation = std::atan2(d.z(), ground);
  return s;
}

Vec3 from_sensor_spherical(const SensorPose& sensor, const SphericalCoord& s) {
  const double ground = s.range * std::cos(s.elevation);
  const double heading = sensor.yaw + s.azimuth;
  return sensor.position() + Vec3(ground * std::cos(heading),
                                  ground * std::sin(heading),
                                  s.range * std::sin(s.elevation));
}

PolarCoord to_sensor_polar(const SensorPose& sensor, const Vec2& p) {
  const Vec2 d = p - sensor.ground();
  return {d.norm(), wrap_angle(std::atan2(d.y(), d.x()) - sensor.yaw)};
}

bool in_fov_2d(const SensorPose& sensor, const Vec2& p) {
  const PolarCoord pc = to_sensor_polar(sensor, p);
  return pc.range <= sensor.fov.max_range &&
         std::abs(pc.azimuth) <= sensor.fov.azimuth_half_angle;
}

bool in_fov_3d(const SensorPose& sensor, const Vec3& p) {
  const SphericalCoord s = to_sensor_spherical(sensor, p);
  return s.range <= sensor.fov.max_range &&
         std::abs(s.azimuth) <= sensor.fov.azimuth_half_angle &&
         s.elevation >= sensor.fov.elevation_min &&
         s.elevation <= sensor.fov.elevation_max;
}

bool footprint_in_fov(const SensorPose& sensor, const OrientedRect& rect) {
  constexpr int kSamples = 9;
  const Vec2 u = rect.axis_u() * rect.length;
  const Vec2 v = rect.axis_v() * rect.width;
  for (int a = 0; a < kSamples; ++a) {
    for (int b = 0; b < kSamples; ++b) {
      const double fa = static_cast<double>(a) / (kSamples - 1) - 0.5;
      const double fb = static_cast<double>(b) / (kSamples - 1) - 0.5;
      if (in_fov_2d(sensor, rect.center + fa * u + fb * v)) return true;
    }
  }
  return false;
}

}  // namespace sensorvis
