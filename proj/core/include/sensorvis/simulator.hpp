#ifndef SENSORVIS_SIMULATOR_HPP_
#define SENSORVIS_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sensorvis/frame.hpp"
#include "sensorvis/geometry.hpp"
#include "sensorvis/object.hpp"
#include "sensorvis/sensor_models.hpp"

namespace sensorvis {

// Per-class extent ranges; each vehicle draws its extent uniformly.
struct ClassProfile {
  std::string label;
  Interval length;
  Interval width;
  Interval height;

  Extent nominal() const {
    return {0.5 * (length.lo + length.hi), 0.5 * (width.lo + width.hi),
            0.5 * (height.lo + height.hi)};
  }
};

struct RadarDetectionModel {
  bool deterministic = true;  // forces one noiseless return per visible object
  double p_detect_visible = 1.0;
  int min_returns = 1;
  int max_returns = 1;
  double position_sigma = 0.0;  // meters, per axis
  double doppler_sigma = 0.0;   // m/s
  double clutter_rate = 0.0;    // mean clutter returns per frame
  double quality = 1.0;

  void validate() const;
};

// Pinhole camera. Image u grows to the right, v downwards.
struct CameraModel {
  double fx = 1200.0;
  double fy = 1200.0;
  double cx = 960.0;
  double cy = 540.0;
  int image_width = 1920;
  int image_height = 1080;
  double max_detection_distance = 80.0;  // ground distance to the nearest footprint point

  void validate() const;
  // World-to-camera rotation (rows: right, down, forward).
  Eigen::Matrix3d rotation(const SensorPose& pose) const;
  Eigen::Matrix3d intrinsics() const;
  Projection projection(const SensorPose& pose) const;
  // Absent when the point is not in front of the camera.
  std::optional<Vec2> project(const SensorPose& pose, const Vec3& p) const;
  // Image-to-ground homography of the plane z = 0.
  Eigen::Matrix3d ground_homography(const SensorPose& pose) const;
};

struct SceneConfig {
  int lanes_per_direction = 3;
  double lane_width = 3.5;
  double road_start_x = 0.0;
  double road_end_x = 120.0;
  double duration = 60.0;
  double frame_rate = 10.0;
  int vehicle_count = 20;
  double truck_ratio = 0.2;
  ClassProfile car{"car", {4.2, 4.8}, {1.75, 1.9}, {1.4, 1.6}};
  ClassProfile truck{"truck", {12.0, 16.0}, {2.45, 2.55}, {3.6, 4.0}};
  Interval speed{20.0, 32.0};  // m/s, one constant speed per lane
  double min_gap = 8.0;        // bumper-to-bumper, meters
  std::uint64_t seed = 1;
  int surface_samples = 64;

  SensorPose radar{0.0, 0.0, 6.0, 0.0, 0.0, {}};
  RadarDetectionModel radar_model;

  bool camera_enabled = false;
  // Field of view roughly matching the default camera model at this pitch.
  SensorPose camera{0.0, 0.0, 6.0, 0.0, deg2rad(-8.0),
                    {80.0, deg2rad(38.0), deg2rad(-32.23), deg2rad(16.23)}};
  CameraModel camera_model;

  void validate() const;
  int frame_count() const;
  double lane_center_y(int direction, int lane) const;
};

// Frames with ground truth, radar returns and camera boxes, plus the exact
// per-object occlusion flag for the radar pose (parallel to frames[i].objects).
struct GroundTruthLog {
  std::vector<Frame> frames;
  std::vector<std::vector<std::uint8_t>> occluded;

  bool operator==(const GroundTruthLog&) const = default;
};

// Trajectories only: objects per frame, no sensor data.
std::vector<Frame> generate_trajectories(const SceneConfig& cfg);

// Full scene: trajectories, occlusion flags, radar returns and, if enabled,
// camera boxes.
GroundTruthLog generate_scene(const SceneConfig& cfg);

// Points on the box faces that face `viewpoint`, about k in total, spread in
// proportion to face area on a regular lattice per face that includes the face
// edges and corners.
std::vector<Vec3> facing_surface_samples(const OrientedBox& box, const Vec3& viewpoint,
                                         int k);

// Surface samples of target whose segment to the sensor is not blocked by any
// other object (objects with target.id are skipped).
std::vector<Vec3> visible_surface_points(std::span<const ObjectState> objects,
                                         const SensorPose& sensor,
                                         const ObjectState& target, int k = 64);

// Occluded iff every sampled line of sight to the target is blocked.
bool occlusion_oracle(std::span<const ObjectState> objects, const SensorPose& sensor,
                      const ObjectState& target, int k = 64);

// Radar returns per frame. Only objects with a visible sample inside the 3D
// field of view produce returns.
std::vector<std::vector<Measurement>> simulate_radar(std::span<const Frame> frames,
                                                     const SensorPose& sensor,
                                                     const RadarDetectionModel& model,
                                                     std::uint64_t seed,
                                                     int surface_samples = 64);

// Bounding rectangles of the projected boxes of non-occluded objects whose
// footprint comes within the detection distance. Rectangles are not clipped to
// the image; an object is detected when the projection of its part in front of
// the camera overlaps the image.
std::vector<std::vector<BoundingBox2D>> simulate_camera(std::span<const Frame> frames,
                                                        const SensorPose& camera,
                                                        const CameraModel& model,
                                                        int surface_samples = 64);

}  // namespace sensorvis

#endif  // SENSORVIS_SIMULATOR_HPP_
