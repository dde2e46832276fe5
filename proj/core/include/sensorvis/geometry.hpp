#ifndef SENSORVIS_GEOMETRY_HPP_
#define SENSORVIS_GEOMETRY_HPP_

#include <array>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace sensorvis {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool well_ordered() const { return lo <= hi; }
};

struct Extent {
  double length = 4.5;
  double width = 1.8;
  double height = 1.5;

  bool operator==(const Extent&) const = default;
};

// Rectangle on the ground plane, centered at `center`, long side along `yaw`.
struct OrientedRect {
  Vec2 center = Vec2::Zero();
  double yaw = 0.0;
  double length = 1.0;
  double width = 1.0;

  // Unit vectors along the length and width axes.
  Vec2 axis_u() const;
  Vec2 axis_v() const;
  // Counter-clockwise starting at (+l/2, +w/2) in the local frame.
  std::array<Vec2, 4> corners() const;
  // Strict interior test.
  bool contains(const Vec2& p) const;
  // Euclidean distance from p to the rectangle (0 inside).
  double distance(const Vec2& p) const;
  // Distance from the segment ab to the rectangle (0 when they meet).
  double distance(const Vec2& a, const Vec2& b) const;
};

// Upright box standing on z = base_z.
struct OrientedBox {
  OrientedRect footprint;
  double base_z = 0.0;
  double height = 1.0;

  double top_z() const { return base_z + height; }
  Vec3 center() const;
  bool contains(const Vec3& p) const;
  std::array<Vec3, 8> corners() const;
  // Box grown by `margin` on every side (and on top); the base stays put.
  OrientedBox dilated(double margin) const;
};

// Parameter interval [t_in, t_out] of the part of segment a + t (b - a),
// t in [0, 1], that lies inside the box. Empty when they do not meet.
std::optional<std::array<double, 2>> segment_box_overlap(const Vec3& a,
                                                         const Vec3& b,
                                                         const OrientedBox& box);

// True iff the segment passes through the box interior over a length of more
// than `min_length` meters. Touching a face or an edge does not block.
bool segment_blocked(const Vec3& a, const Vec3& b, const OrientedBox& box,
                     double min_length = 1e-6);

// Same as segment_box_overlap but along an unbounded ray origin + t * dir,
// t >= 0. `dir` need not be normalized; t is in units of |dir|.
std::optional<std::array<double, 2>> ray_box_overlap(const Vec3& origin,
                                                     const Vec3& dir,
                                                     const OrientedBox& box);

// Static field of view: range and angular limits in the sensor frame.
struct FovSpec {
  double max_range = 100.0;
  double azimuth_half_angle = kPi / 2.0;
  double elevation_min = -kPi / 2.0;
  double elevation_max = kPi / 2.0;

  void validate() const;
};

// Mounting pose. Azimuth is measured from `yaw` in the ground plane,
// elevation from the horizontal plane. `pitch` only tilts camera optics.
struct SensorPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double pitch = 0.0;
  FovSpec fov;

  Vec3 position() const { return {x, y, z}; }
  Vec2 ground() const { return {x, y}; }
  void validate() const;
};

// Spherical coordinates of a world point relative to a sensor.
struct SphericalCoord {
  double range = 0.0;      // slant range, meters
  double azimuth = 0.0;    // radians, relative to sensor yaw, in (-pi, pi]
  double elevation = 0.0;  // radians above the horizontal
};

SphericalCoord to_sensor_spherical(const SensorPose& sensor, const Vec3& p);
Vec3 from_sensor_spherical(const SensorPose& sensor, const SphericalCoord& s);

// Ground range and azimuth of a ground point relative to the sensor.
struct PolarCoord {
  double range = 0.0;
  double azimuth = 0.0;
};
PolarCoord to_sensor_polar(const SensorPose& sensor, const Vec2& p);

// Range and azimuth limits only; elevation is a property of the 3D models.
bool in_fov_2d(const SensorPose& sensor, const Vec2& p);
// Slant range, azimuth and elevation limits.
bool in_fov_3d(const SensorPose& sensor, const Vec3& p);
// True iff any part of the rectangle lies inside the 2D field of view
// (checked on a dense boundary and interior sampling).
bool footprint_in_fov(const SensorPose& sensor, const OrientedRect& rect);

}  // namespace sensorvis

#endif  // SENSORVIS_GEOMETRY_HPP_
