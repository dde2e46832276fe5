#ifndef SENSORVIS_ESTIMATORS_HPP_
#define SENSORVIS_ESTIMATORS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sensorvis/frame.hpp"
#include "sensorvis/grid.hpp"
#include "sensorvis/sensor_models.hpp"
#include "sensorvis/visibility.hpp"

namespace sensorvis {

enum class EstimatorKind { kRadar2D, kRadar3D, kCamera3D, kReference };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

struct EstimatorConfig {
  GridSpec2D output{0.0, -12.0, 120, 24, 1.0};
  SensorPose sensor;
  RadarFilterConfig filter;
  IsmConfig ism;
  DecayConfig decay;
  OccupancyThreshold threshold;

  // 3D radar and reference estimator.
  SphericalGridSpec spherical;
  double slice_height = 1.0;
  bool graded = false;
  // Ground-truth boxes are grown by this much before rasterization.
  double reference_margin = 0.15;

  // Camera.
  Eigen::Matrix3d homography = Eigen::Matrix3d::Identity();
  SizePrior size_prior{{"car", {4.5, 1.8, 1.5}}, {"truck", {14.0, 2.5, 4.0}}};
  double voxel_z_min = 0.0;
  double voxel_z_max = 4.0;
  int voxel_layers = 8;
  double occupied_value = 0.9;
  double squash_z_lo = 0.0;
  double squash_z_hi = 4.0;
  DecayConfig camera_decay{0.001};
  // Traffic direction (world yaw, modulo pi) used to orient estimated boxes.
  std::optional<double> camera_heading_prior;
  // Voxels projecting outside the image are not visible.
  int image_width = 1920;
  int image_height = 1080;

  void validate() const;
  VoxelGridSpec voxel_spec() const {
    return {output, voxel_z_min, voxel_z_max, voxel_layers};
  }
};

// One time step of input; each estimator reads the parts it needs.
struct FrameInput {
  double t = 0.0;
  double dt = 0.0;
  std::span<const Measurement> radar;
  std::span<const BoundingBox2D> boxes;
  std::span<const ObjectState> objects;
};

// Common interface of the four estimators. Implementations keep their
// occupancy state between calls.
class VisibilityEstimator {
 public:
  virtual ~VisibilityEstimator() = default;
  virtual EstimatorKind kind() const = 0;
  virtual VisibilityGrid2D estimate(const FrameInput& frame) = 0;
};

// Preprocess, decay, Gaussian ISM on a 2D Cartesian grid, 2D raytracing.
class Radar2DEstimator final : public VisibilityEstimator {
 public:
  explicit Radar2DEstimator(const EstimatorConfig& cfg);

  EstimatorKind kind() const override { return EstimatorKind::kRadar2D; }
  VisibilityGrid2D estimate(const FrameInput& frame) override {
    return run(frame.radar, frame.dt);
  }
  VisibilityGrid2D run(std::span<const Measurement> frame, double dt);
  const Grid2D& occupancy() const { return occupancy_; }

 private:
  EstimatorConfig cfg_;
  Grid2D occupancy_;
};

// Preprocess, decay, dual ISM on a spherical grid, then the spherical
// visibility stack.
class Radar3DEstimator final : public VisibilityEstimator {
 public:
  explicit Radar3DEstimator(const EstimatorConfig& cfg);

  EstimatorKind kind() const override { return EstimatorKind::kRadar3D; }
  VisibilityGrid2D estimate(const FrameInput& frame) override {
    return run(frame.radar, frame.dt);
  }
  VisibilityGrid2D run(std::span<const Measurement> frame, double dt);
  const SphericalGrid& occupancy() const { return occupancy_; }
  // Returns that fell outside the spherical grid.
  int ignored_measurements() const { return ignored_; }

 private:
  EstimatorConfig cfg_;
  SphericalGrid occupancy_;
  int ignored_ = 0;
};

// 3D boxes from 2D detections, voxel occupancy, voxel raytracing and
// z-averaging.
class Camera3DEstimator final : public VisibilityEstimator {
 public:
  explicit Camera3DEstimator(const EstimatorConfig& cfg);

  EstimatorKind kind() const override { return EstimatorKind::kCamera3D; }
  VisibilityGrid2D estimate(const FrameInput& frame) override {
    return run(frame.boxes, frame.dt);
  }
  VisibilityGrid2D run(std::span<const BoundingBox2D> frame, double dt);
  const VoxelGrid& occupancy() const { return occupancy_; }
  // Detections dropped because they could not be placed inside the grid.
  int ignored_detections() const { return ignored_; }

 private:
  EstimatorConfig cfg_;
  Homography homography_;
  VoxelGrid occupancy_;
  std::vector<std::uint8_t> in_view_;  // per voxel
  int ignored_ = 0;
};

// Perfect occupancy from ground-truth boxes fed through the spherical
// visibility stack of the 3D radar estimator.
class ReferenceEstimator final : public VisibilityEstimator {
 public:
  explicit ReferenceEstimator(const EstimatorConfig& cfg);

  EstimatorKind kind() const override { return EstimatorKind::kReference; }
  VisibilityGrid2D estimate(const FrameInput& frame) override {
    return run(frame.objects);
  }
  VisibilityGrid2D run(std::span<const ObjectState> objects);

 private:
  EstimatorConfig cfg_;
};

std::unique_ptr<VisibilityEstimator> make_estimator(EstimatorKind kind,
                                                    const EstimatorConfig& cfg);

// Binary occupancy (0 free, 1 occupied) of the bins whose center ray passes
// through an object box grown by `margin`.
SphericalGrid rasterize_objects_spherical(const SphericalGridSpec& spec,
                                          const SensorPose& sensor,
                                          std::span<const ObjectState> objects,
                                          double margin);

// First-hit form of rasterize_objects_spherical: the first covered range bin
// of every ray.
FirstHitMap rasterize_first_hits(const SphericalGridSpec& spec, const SensorPose& sensor,
                                 std::span<const ObjectState> objects, double margin);

// Raytrace, slice at cfg.slice_height, resample to cfg.output and restrict to
// the sensor's field of view. Slice bins outside the elevation span read as
// invisible.
VisibilityGrid2D spherical_visibility_stack(const SphericalGrid& occ,
                                            const EstimatorConfig& cfg);
// Binary-mode stack starting from first hits.
VisibilityGrid2D spherical_visibility_stack(const FirstHitMap& hits,
                                            const EstimatorConfig& cfg);

// Runs an estimator over a frame sequence; dt is the gap to the previous
// frame (0 for the first).
std::vector<VisibilityGrid2D> run_estimator(VisibilityEstimator& estimator,
                                            std::span<const Frame> frames);

}  // namespace sensorvis

#endif  // SENSORVIS_ESTIMATORS_HPP_
