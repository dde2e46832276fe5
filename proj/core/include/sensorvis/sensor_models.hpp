#ifndef SENSORVIS_SENSOR_MODELS_HPP_
#define SENSORVIS_SENSOR_MODELS_HPP_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sensorvis/geometry.hpp"
#include "sensorvis/grid.hpp"

namespace sensorvis {

enum class MeasurementKind { kRadar, kCameraPoint };

// World-frame position.
struct CartesianPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const CartesianPosition&) const = default;
};

// Sensor-frame slant range, azimuth and elevation.
struct PolarPosition {
  double r = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;

  bool operator==(const PolarPosition&) const = default;
};

// One low-level sensor return. Exactly one position representation is held;
// conversions go through to_cartesian / to_polar.
struct Measurement {
  MeasurementKind kind = MeasurementKind::kRadar;
  std::variant<CartesianPosition, PolarPosition> position;
  double doppler = 0.0;  // m/s, positive when receding
  double quality = 1.0;
  double rcs = 0.0;  // dBsm
  double timestamp = 0.0;
  int source_id = -1;  // simulator object id, -1 for clutter or unknown

  bool is_cartesian() const {
    return std::holds_alternative<CartesianPosition>(position);
  }
  bool is_polar() const { return std::holds_alternative<PolarPosition>(position); }

  bool operator==(const Measurement&) const = default;
};

Vec3 world_position(const Measurement& m, const SensorPose& sensor);
Measurement to_cartesian(const Measurement& m, const SensorPose& sensor);
Measurement to_polar(const Measurement& m, const SensorPose& sensor);

struct RadarFilterConfig {
  double min_quality = 0.0;
  Interval elevation{-kPi / 2.0, kPi / 2.0};
  Interval rcs{-100.0, 100.0};
  double min_abs_doppler = 0.0;

  void validate() const;
};

// Keeps the measurements that pass the quality, elevation, RCS and radial
// velocity predicates, preserving order. Elevation is taken relative to
// `sensor`.
std::vector<Measurement> preprocess_radar(std::span<const Measurement> in,
                                          const RadarFilterConfig& cfg,
                                          const SensorPose& sensor);

struct IsmConfig {
  double peak_occupancy = 0.9;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity() * 0.5;
  double sigma_range = 0.5;
  double sigma_azimuth = deg2rad(0.5);
  double sigma_elevation = deg2rad(0.5);
  double free_space_decrement = 0.05;
  double occupancy_prior = 0.5;

  void validate() const;
};

// Signed occupancy increment for one cell. Applying a delta means
// v' = clamp(v + delta, 0, 1).
struct CellDelta {
  std::size_t index = 0;
  float delta = 0.0f;
};

// Evidence of one Cartesian measurement: a scaled Gaussian increment on the
// cells within 3 sigma of it, and a constant decrement on the cells crossed
// by the sensor-to-measurement segment before that neighborhood.
std::vector<CellDelta> ism_evidence_cartesian(const GridSpec2D& spec,
                                              const Measurement& z,
                                              const SensorPose& sensor,
                                              const IsmConfig& cfg);

// Dual model on the spherical grid: free evidence on the bins of the
// measurement's ray family in front of it, Gaussian occupied evidence
// around it, nothing behind it.
std::vector<CellDelta> ism_evidence_spherical(const SphericalGridSpec& spec,
                                              const Measurement& z,
                                              const IsmConfig& cfg);

// Applies deltas one at a time, clamping after each.
void apply_evidence(std::span<float> values, std::span<const CellDelta> deltas);

void ism_update_cartesian(Grid2D& grid, const Measurement& z,
                          const SensorPose& sensor, const IsmConfig& cfg);
void ism_update_spherical(SphericalGrid& grid, const Measurement& z,
                          const IsmConfig& cfg);

struct DecayConfig {
  double decay_rate = 0.5;  // remaining deviation from the prior after 1 s

  void validate() const;
};

// v' = 0.5 + (v - 0.5) * decay_rate^dt for every value.
void apply_decay(std::span<float> values, double dt, const DecayConfig& cfg);

template <class Spec>
void apply_decay(ScalarGrid<Spec>& grid, double dt, const DecayConfig& cfg) {
  apply_decay(grid.span(), dt, cfg);
}

struct BoundingBox2D {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 1.0;
  double v_max = 1.0;
  std::string label;
  double confidence = 1.0;
  int source_id = -1;

  void validate() const;
  bool operator==(const BoundingBox2D&) const = default;
};

struct BoundingBox3D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  Extent extent;
  std::string label;

  OrientedBox box() const;
};

// Image (u, v, 1) to ground (x, y, 1), up to scale.
class Homography {
 public:
  explicit Homography(const Eigen::Matrix3d& image_to_ground);

  // Absent when the point maps to infinity.
  std::optional<Vec2> to_ground(double u, double v) const;
  std::optional<Vec2> to_image(const Vec2& ground) const;
  const Eigen::Matrix3d& matrix() const { return h_; }

 private:
  Eigen::Matrix3d h_;
  Eigen::Matrix3d inverse_;
};

using SizePrior = std::map<std::string, Extent>;

// World-to-camera rotation of a pinhole camera (rows: right, down, forward).
// Yaw turns the optical axis in the ground plane, pitch tilts it up.
Eigen::Matrix3d camera_rotation(const SensorPose& pose);

// 3x4 world-to-image projection, scaled so that the third output is the depth
// along the optical axis.
using Projection = Eigen::Matrix<double, 3, 4>;

// The projection that agrees with an image-to-ground homography for a camera
// at `camera` (intrinsics are recovered from the homography).
Projection projection_from_homography(const Homography& h, const SensorPose& camera);

// Image bounds {u_min, v_min, u_max, v_max} of the part of `box` that lies at
// least `near` in front of the camera: corners in front plus the points where
// box edges cross the near plane. Absent when nothing is in front.
std::optional<std::array<double, 4>> project_box_bounds(const Projection& p,
                                                        const OrientedBox& box,
                                                        double near = 0.1);

// Places a 3D box from a 2D detection: the bottom-center of the box is
// projected onto the ground, yaw is taken perpendicular to the projected
// bottom edge and the extent comes from the class prior. When the camera pose
// is given, the box center is pushed back by half its length away from the
// camera, since the bottom edge of the image box marks the nearest face.
//
// A yaw prior (a known traffic direction, modulo pi) together with the camera
// pose replaces both heuristics: the yaw is taken from the prior and the center
// is placed so that the projection of the prior-sized box matches all four
// sides of the detection. This resolves long vehicles seen at an angle and
// vehicles cut by the image border or the near plane.
BoundingBox3D estimate_box3d(const BoundingBox2D& box, const Homography& h,
                             const SizePrior& size_prior,
                             const std::optional<SensorPose>& camera = {},
                             std::optional<double> yaw_prior = {});

// Raises every voxel whose center is inside a box by
// (occupied_value - 0.5), clamped to [0, 1].
void voxelize_boxes(VoxelGrid& grid, std::span<const BoundingBox3D> boxes,
                    double occupied_value);

}  // namespace sensorvis

#endif  // SENSORVIS_SENSOR_MODELS_HPP_
