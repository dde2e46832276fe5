#include "sensorvis/estimators.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "sensorvis/error.hpp"
#include "sensorvis/simulator.hpp"
#include "test_support.hpp"

namespace sensorvis {
namespace {

using testing::make_object;
using testing::sensor_at;

EstimatorConfig radar_config() {
  EstimatorConfig cfg;
  cfg.sensor = sensor_at(0.0, 0.0, 6.0, 130.0, kPi / 2.0);
  cfg.output = {0.0, -12.0, 120, 24, 1.0};
  cfg.spherical.r_max = 130.0;
  cfg.spherical.n_range = 130;
  return cfg;
}

EstimatorConfig camera_config(const SceneConfig& scene) {
  EstimatorConfig cfg;
  cfg.sensor = scene.camera;
  cfg.homography = scene.camera_model.ground_homography(scene.camera);
  cfg.output = {0.0, -12.0, 160, 48, 0.5};
  cfg.camera_heading_prior = 0.0;
  cfg.image_width = scene.camera_model.image_width;
  cfg.image_height = scene.camera_model.image_height;
  return cfg;
}

Measurement return_at(double x, double y, double z) {
  Measurement m;
  m.position = CartesianPosition{x, y, z};
  return m;
}

double cell_agreement(const VisibilityGrid2D& vis, auto&& oracle) {
  std::size_t agree = 0, total = 0;
  for (std::size_t k = 0; k < vis.values.size(); ++k) {
    if (!vis.fov_mask[k]) continue;
    const auto expected = oracle(vis.spec.unflat(k));
    if (!expected) continue;
    agree += (vis.values[k] >= 0.5f) == *expected;
    ++total;
  }
  return total ? static_cast<double>(agree) / total : 0.0;
}

TEST(EstimatorKind, Names) {
  for (EstimatorKind k : {EstimatorKind::kRadar2D, EstimatorKind::kRadar3D,
                          EstimatorKind::kCamera3D, EstimatorKind::kReference}) {
    EXPECT_EQ(parse_estimator_kind(to_string(k)), k);
    const EstimatorConfig cfg =
        k == EstimatorKind::kCamera3D ? camera_config(SceneConfig{}) : radar_config();
    EXPECT_EQ(make_estimator(k, cfg)->kind(), k);
  }
  EXPECT_THROW(parse_estimator_kind("lidar"), Error);
}

TEST(EstimatorConfig, Validation) {
  EstimatorConfig cfg = radar_config();
  cfg.reference_margin = -1.0;
  EXPECT_THROW(Radar2DEstimator{cfg}, Error);
  cfg = radar_config();
  cfg.threshold.occupied_above = 0.4;
  EXPECT_THROW(Radar3DEstimator{cfg}, Error);
  cfg = radar_config();
  cfg.squash_z_lo = 5.0;
  EXPECT_THROW(ReferenceEstimator{cfg}, Error);
}

// ---- radar 2D

TEST(Radar2D, NoMeasurementsFullFov) {
  Radar2DEstimator est(radar_config());
  const VisibilityGrid2D vis = est.run({}, 0.0);
  for (std::size_t k = 0; k < vis.values.size(); ++k) {
    EXPECT_EQ(vis.values[k], vis.fov_mask[k] ? 1.0f : 0.0f);
  }
}

// Returns along the near face of a truck at 30 m; cells whose line of sight
// from the sensor crosses the truck must be hidden.
TEST(Radar2D, TruckShadowMatchesGeometry) {
  Radar2DEstimator est(radar_config());
  std::vector<Measurement> frame;
  for (double y = -1.25; y <= 1.25; y += 0.25) frame.push_back(return_at(30.0, y + 0.5, 1.0));
  const VisibilityGrid2D vis = est.run(frame, 0.0);
  const double agree = cell_agreement(vis, [&](CellIndex c) -> std::optional<bool> {
    const Vec2 p = cell_center(vis.spec, c);
    if (p.x() < 33.0) return p.x() < 27.0 ? std::optional<bool>(true) : std::nullopt;
    // Shadow by angle, with one cell of slack at the edges.
    const double half = std::atan2(1.25, 30.0);
    const double a = std::atan2(p.y() - 0.5, p.x());
    if (std::abs(a) < half - 0.02) return false;
    if (std::abs(a) > half + 0.08) return true;
    return std::nullopt;
  });
  EXPECT_GE(agree, 0.99);
}

TEST(Radar2D, RepeatedFramesReachFixpoint) {
  EstimatorConfig cfg = radar_config();
  Radar2DEstimator est(cfg);
  std::vector<Measurement> frame{return_at(40.0, 3.0, 0.5), return_at(60.0, -4.0, 0.5),
                                 return_at(25.0, -8.0, 1.0)};
  std::vector<VisibilityGrid2D> series;
  for (int k = 0; k < 20; ++k) series.push_back(est.run(frame, k == 0 ? 0.0 : 0.1));
  int settled = 20;
  for (int k = 19; k >= 0 && series[k] == series.back(); --k) settled = k;
  EXPECT_LE(settled, 10);
}

// ---- radar 3D

TEST(Radar3D, OverlooksLowOccluder) {
  // One noiseless return per object: a 2 m occluder at 20 m and a car at
  // 100 m behind it.
  Frame f;
  f.objects = {make_object(0, 20.0, 0.0, {4.0, 2.0, 2.0}), make_object(1, 100.0, 0.0)};
  const EstimatorConfig cfg = radar_config();
  const auto frame = simulate_radar(std::vector{f}, cfg.sensor, RadarDetectionModel{}, 1)[0];
  ASSERT_EQ(frame.size(), 2u);
  Radar3DEstimator r3(cfg);
  Radar2DEstimator r2(cfg);
  VisibilityGrid2D v3, v2;
  for (int k = 0; k < 5; ++k) {
    v3 = r3.run(frame, k ? 0.1 : 0.0);
    v2 = r2.run(frame, k ? 0.1 : 0.0);
  }
  EXPECT_TRUE(object_visibility(v3, f.objects[1]));
  // The 2D grid casts an unlimited shadow behind the occluder.
  EXPECT_FALSE(object_visibility(v2, f.objects[1]));
  EXPECT_EQ(v2.at({60, 12}), 0.0f);
}

TEST(Radar3D, NearRangeBelowElevationFov) {
  EstimatorConfig cfg = radar_config();
  cfg.spherical.elevation_min = deg2rad(-15.0);
  cfg.spherical.n_elevation = 25;
  Radar3DEstimator est(cfg);
  const VisibilityGrid2D vis = est.run({}, 0.0);
  // The 1 m slice point at 10 m ground range lies at -26.6 deg.
  EXPECT_EQ(vis.at({10, 12}), 0.0f);
  EXPECT_EQ(vis.at({40, 12}), 1.0f);
}

TEST(Radar3D, ReturnsOutsideSphereAreCounted) {
  EstimatorConfig cfg = radar_config();
  Radar3DEstimator est(cfg);
  est.run(std::vector{return_at(-10.0, 0.0, 1.0), return_at(50.0, 0.0, 1.0)}, 0.0);
  EXPECT_EQ(est.ignored_measurements(), 1);
}

// ---- reference

TEST(Reference, NoObjectsFullVisibility) {
  EstimatorConfig cfg = radar_config();
  ReferenceEstimator est(cfg);
  const VisibilityGrid2D vis = est.run({});
  for (std::size_t k = 0; k < vis.values.size(); ++k) {
    const Vec2 p = cell_center(vis.spec, vis.spec.unflat(k));
    // Inside the elevation span of the default spherical grid.
    if (vis.fov_mask[k] && std::atan2(-5.0, p.norm()) > cfg.spherical.elevation_min + 0.02) {
      EXPECT_EQ(vis.values[k], 1.0f) << p.transpose();
    }
  }
}

// The slice at 1 m is hidden exactly where the segment from the sensor to
// the point 1 m above the cell center passes through the truck.
TEST(Reference, TruckShadowMatchesSegmentOracle) {
  EstimatorConfig cfg = radar_config();
  cfg.spherical.n_azimuth = 720;
  cfg.spherical.n_elevation = 220;
  cfg.reference_margin = 0.0;
  const ObjectState truck = make_object(1, 30.0, 3.5, {14.0, 2.5, 4.0});
  ReferenceEstimator est(cfg);
  const VisibilityGrid2D vis = est.run(std::vector{truck});
  const OrientedBox box = truck.box();
  const double agree = cell_agreement(vis, [&](CellIndex c) -> std::optional<bool> {
    const Vec2 p = cell_center(vis.spec, c);
    if (std::atan2(-5.0, p.norm()) < cfg.spherical.elevation_min + 0.02) return std::nullopt;
    if (box.footprint.contains(p)) return std::nullopt;
    return !segment_blocked(cfg.sensor.position(), Vec3(p.x(), p.y(), 1.0), box);
  });
  EXPECT_GE(agree, 0.98);
}

TEST(Reference, RasterizationFirstHitsAgree) {
  EstimatorConfig cfg = radar_config();
  const std::vector objects{make_object(1, 30.0, 3.5, {14.0, 2.5, 4.0}),
                            make_object(2, 50.0, -5.0)};
  const SphericalGrid occ =
      rasterize_objects_spherical(cfg.spherical, cfg.sensor, objects, 0.15);
  EXPECT_EQ(first_hits(occ, cfg.threshold),
            rasterize_first_hits(cfg.spherical, cfg.sensor, objects, 0.15));
  EXPECT_EQ(spherical_visibility_stack(occ, cfg),
            spherical_visibility_stack(first_hits(occ, cfg.threshold), cfg));
}

// ---- camera

bool all_layers_in_image(const SceneConfig& scene, const VoxelGridSpec& s, CellIndex c) {
  for (int k = 0; k < s.n_z; ++k) {
    const Vec3 p = s.voxel_center(c, k);
    const auto uv = scene.camera_model.project(scene.camera, p);
    if (!uv || !in_fov_3d(scene.camera, p) || uv->x() < 0 || uv->y() < 0 ||
        uv->x() >= scene.camera_model.image_width || uv->y() >= scene.camera_model.image_height) {
      return false;
    }
  }
  return true;
}

TEST(Camera3D, NoDetectionsFullVisibilityInView) {
  const SceneConfig scene;
  const EstimatorConfig cfg = camera_config(scene);
  Camera3DEstimator est(cfg);
  const VisibilityGrid2D vis = est.run({}, 0.0);
  int full = 0;
  for (std::size_t k = 0; k < vis.values.size(); ++k) {
    if (all_layers_in_image(scene, cfg.voxel_spec(), vis.spec.unflat(k))) {
      EXPECT_EQ(vis.values[k], 1.0f);
      ++full;
    } else {
      EXPECT_LT(vis.values[k], 1.0f);
    }
  }
  EXPECT_GT(full, 1000);
}

// The estimated truck shadow against the fraction of the 0-4 m column that the
// true truck hides.
TEST(Camera3D, TruckShadowMatchesSimulator) {
  SceneConfig scene;
  const ObjectState truck = make_object(1, 35.0, -5.25, {14.0, 2.5, 4.0});
  Frame f;
  f.objects.push_back(truck);
  const auto boxes = simulate_camera(std::vector{f}, scene.camera, scene.camera_model);
  ASSERT_EQ(boxes[0].size(), 1u);
  const EstimatorConfig cfg = camera_config(scene);
  Camera3DEstimator est(cfg);
  const VisibilityGrid2D vis = est.run(boxes[0], 0.0);
  const VoxelGridSpec vs = cfg.voxel_spec();
  const OrientedBox box = truck.box();
  int shadow_cells = 0;
  const double agree = cell_agreement(vis, [&](CellIndex c) -> std::optional<bool> {
    if (!all_layers_in_image(scene, vs, c)) return std::nullopt;
    // The truck's own cells and a meter around them depend on the box fit.
    if (box.dilated(1.0).footprint.contains(cell_center(vs.base, c))) return std::nullopt;
    int hidden = 0;
    for (int k = 0; k < vs.n_z; ++k) {
      hidden += segment_blocked(scene.camera.position(), vs.voxel_center(c, k), box);
    }
    // Decide only where the truth is clear-cut.
    if (hidden == 0) return true;
    if (hidden == vs.n_z) {
      ++shadow_cells;
      return false;
    }
    return std::nullopt;
  });
  EXPECT_GT(shadow_cells, 50);
  EXPECT_GE(agree, 0.97);
}

TEST(Camera3D, DetectionOutsideGridIgnored) {
  SceneConfig scene;
  EstimatorConfig cfg = camera_config(scene);
  cfg.output = {0.0, -12.0, 60, 48, 0.5};  // ends at 30 m
  Frame f;
  f.objects.push_back(make_object(1, 60.0, -5.25));
  const auto boxes = simulate_camera(std::vector{f}, scene.camera, scene.camera_model);
  ASSERT_EQ(boxes[0].size(), 1u);
  Camera3DEstimator est(cfg);
  const VisibilityGrid2D vis = est.run(boxes[0], 0.0);
  EXPECT_EQ(est.ignored_detections(), 1);
  const Camera3DEstimator fresh(cfg);
  EXPECT_EQ(est.occupancy(), fresh.occupancy());
}

TEST(RunEstimator, TimestampsAndDt) {
  SceneConfig scene;
  scene.vehicle_count = 10;
  scene.duration = 1.0;
  const GroundTruthLog log = generate_scene(scene);
  EstimatorConfig cfg = radar_config();
  auto est = make_estimator(EstimatorKind::kRadar2D, cfg);
  const auto series = run_estimator(*est, log.frames);
  ASSERT_EQ(series.size(), log.frames.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    EXPECT_EQ(series[k].timestamp, log.frames[k].t);
  }
}

}  // namespace
}  // namespace sensorvis
