#include "sensorvis/visibility.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sensorvis/error.hpp"
#include "test_support.hpp"

namespace sensorvis {
namespace {

using testing::dense_los;
using testing::make_object;
using testing::random_occupancy;
using testing::sensor_at;

// ---- 2D raytracing

TEST(Raytrace2D, AllFreeGridFullyVisible) {
  const GridSpec2D spec{0.0, -10.0, 50, 20, 1.0};
  const Grid2D occ(spec, 0.0f);
  const SensorPose s = sensor_at(0.0, 0.0, 6.0, 30.0, deg2rad(40.0));
  const VisibilityGrid2D vis = raytrace_2d(occ, s, s.fov, {});
  for (std::size_t k = 0; k < spec.cell_count(); ++k) {
    const bool inside = in_fov_2d(s, cell_center(spec, spec.unflat(k)));
    EXPECT_EQ(vis.fov_mask[k] != 0, inside);
    if (inside) {
      EXPECT_EQ(vis.values[k], 1.0f);
    }
  }
}

TEST(Raytrace2D, CollinearBlocking) {
  const GridSpec2D spec{-0.5, -0.5, 20, 3, 1.0};
  Grid2D occ(spec, 0.0f);
  occ[spec.flat({5, 1})] = 1.0f;
  const SensorPose s = sensor_at(0.0, 0.5, 1.0);
  const VisibilityGrid2D vis = raytrace_2d(occ, s, s.fov, {});
  EXPECT_EQ(vis.at({5, 1}), 1.0f);  // the occupied cell itself
  EXPECT_EQ(vis.at({4, 1}), 1.0f);
  EXPECT_EQ(vis.at({10, 1}), 0.0f);
  EXPECT_EQ(vis.at({19, 1}), 0.0f);
}

TEST(Raytrace2D, ThresholdIsInclusive) {
  const GridSpec2D spec{0.0, 0.0, 10, 1, 1.0};
  Grid2D occ(spec, 0.0f);
  occ[3] = 0.7f;
  const SensorPose s = sensor_at(0.0, 0.5, 1.0);
  EXPECT_EQ(raytrace_2d(occ, s, s.fov, {0.7f}).at({6, 0}), 0.0f);
  EXPECT_EQ(raytrace_2d(occ, s, s.fov, {0.71}).at({6, 0}), 1.0f);
  EXPECT_THROW(raytrace_2d(occ, s, s.fov, {0.5}), Error);
}

TEST(Raytrace2D, SensorCellNeverBlocks) {
  const GridSpec2D spec{0.0, 0.0, 10, 10, 1.0};
  Grid2D occ(spec, 0.0f);
  occ[spec.flat({5, 5})] = 1.0f;
  const SensorPose s = sensor_at(5.5, 5.5, 1.0);
  const VisibilityGrid2D vis = raytrace_2d(occ, s, s.fov, {});
  for (float v : vis.values) EXPECT_EQ(v, 1.0f);
}

TEST(Raytrace2D, AgreesWithDenseRaySampling) {
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> pos(0.0, 20.0);
  const GridSpec2D spec{0.0, 0.0, 20, 20, 1.0};
  std::size_t agree = 0, total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Grid2D occ = random_occupancy(spec, rng, 0.15);
    const SensorPose s = sensor_at(pos(rng), pos(rng), 1.0, 100.0);
    const VisibilityGrid2D vis = raytrace_2d(occ, s, s.fov, {});
    for (std::size_t k = 0; k < spec.cell_count(); ++k) {
      const bool oracle = dense_los(occ, s.ground(), spec.unflat(k), {}, 50);
      agree += (vis.values[k] == 1.0f) == oracle;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(agree) / total, 0.99);
}

// Raising occupancy can only remove visibility.
TEST(Raytrace2D, MonotoneInOccupancy) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> cell(0, 399);
  const GridSpec2D spec{0.0, 0.0, 20, 20, 1.0};
  const SensorPose s = sensor_at(10.3, 0.2, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Grid2D occ = random_occupancy(spec, rng, 0.1);
    const VisibilityGrid2D before = raytrace_2d(occ, s, s.fov, {});
    for (int k = 0; k < 5; ++k) occ[cell(rng)] = 1.0f;
    const VisibilityGrid2D after = raytrace_2d(occ, s, s.fov, {});
    for (std::size_t k = 0; k < spec.cell_count(); ++k) {
      EXPECT_LE(after.values[k], before.values[k]);
    }
  }
}

// ---- spherical raytracing

SphericalGridSpec sphere() {
  SphericalGridSpec s;
  s.r_max = 50.0;
  s.n_range = 50;
  s.n_azimuth = 12;
  s.elevation_min = -0.5;
  s.elevation_max = 0.1;
  s.n_elevation = 6;
  return s;
}

TEST(RaytraceSpherical, AllFree) {
  const SphericalGrid occ(sphere(), 0.0f);
  for (float v : raytrace_spherical(occ, {}).values) EXPECT_EQ(v, 1.0f);
}

TEST(RaytraceSpherical, SingleOccupiedBin) {
  SphericalGrid occ(sphere(), 0.0f);
  occ[occ.spec.flat({20, 3, 2})] = 1.0f;
  const SphericalGrid vis = raytrace_spherical(occ, {});
  for (int ir = 0; ir < 50; ++ir) {
    EXPECT_EQ(vis[vis.spec.flat({ir, 3, 2})], ir <= 20 ? 1.0f : 0.0f);
    EXPECT_EQ(vis[vis.spec.flat({ir, 3, 3})], 1.0f);
    EXPECT_EQ(vis[vis.spec.flat({ir, 4, 2})], 1.0f);
  }
}

TEST(RaytraceSpherical, GradedTransmission) {
  SphericalGrid occ(sphere(), 0.5f);
  occ[occ.spec.flat({10, 0, 0})] = 0.75f;
  occ[occ.spec.flat({12, 0, 0})] = 0.75f;
  const SphericalGrid vis = raytrace_spherical(occ, {}, true);
  EXPECT_FLOAT_EQ(vis[vis.spec.flat({10, 0, 0})], 1.0f);
  EXPECT_FLOAT_EQ(vis[vis.spec.flat({11, 0, 0})], 0.5f);
  EXPECT_FLOAT_EQ(vis[vis.spec.flat({13, 0, 0})], 0.25f);
  EXPECT_FLOAT_EQ(vis[vis.spec.flat({49, 0, 0})], 0.25f);
  EXPECT_FLOAT_EQ(vis[vis.spec.flat({49, 1, 0})], 1.0f);
}

TEST(RaytraceSpherical, FirstHitSliceMatchesFullRaytrace) {
  std::mt19937_64 rng(102);
  SphericalGridSpec spec = sphere();
  spec.n_azimuth = 30;
  spec.n_elevation = 40;
  SensorPose s = sensor_at(0.0, 0.0, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    SphericalGrid occ(spec, 0.0f);
    std::bernoulli_distribution hit(0.02);
    for (float& v : occ.values) v = hit(rng) ? 0.9f : 0.3f;
    for (double h : {0.0, 1.0, 2.5}) {
      const PolarGrid full = slice_at_height(raytrace_spherical(occ, {}), s, h);
      const PolarGrid fast = slice_first_hits(first_hits(occ, {}), s, h);
      EXPECT_EQ(full, fast);
    }
  }
}

// ---- voxel raytracing

VoxelGridSpec volume() { return {{0.0, -5.0, 30, 10, 1.0}, 0.0, 4.0, 8}; }

TEST(RaytraceVoxels, EmptyVolumeVisible) {
  const VoxelGrid occ(volume(), 0.0f);
  for (float v : raytrace_voxels(occ, sensor_at(0.0, 0.0, 6.0), {}).values) {
    EXPECT_EQ(v, 1.0f);
  }
}

TEST(RaytraceVoxels, OccluderShadowAndOverlook) {
  VoxelGrid occ(volume(), 0.0f);
  // A 2 m wall spanning x in [10, 11).
  for (int j = 0; j < 10; ++j) {
    for (int k = 0; k < 4; ++k) occ[occ.spec.flat({10, j}, k)] = 1.0f;
  }
  const SensorPose s = sensor_at(0.0, 0.0, 6.0);
  const VoxelGrid vis = raytrace_voxels(occ, s, {});
  // Ground voxel right behind the wall: the ray to it passes below the top.
  EXPECT_EQ(vis[vis.spec.flat({12, 5}, 0)], 0.0f);
  // At x = 29.5 the ray to height 3.75 m clears 2 m at x = 11.
  EXPECT_EQ(vis[vis.spec.flat({29, 5}, 7)], 1.0f);
  // In front of the wall.
  EXPECT_EQ(vis[vis.spec.flat({5, 5}, 0)], 1.0f);
  // The wall's top voxel is seen.
  EXPECT_EQ(vis[vis.spec.flat({10, 5}, 3)], 1.0f);
}

TEST(RaytraceVoxels, OccluderBehindTarget) {
  VoxelGrid occ(volume(), 0.0f);
  for (int k = 0; k < 8; ++k) occ[occ.spec.flat({20, 5}, k)] = 1.0f;
  const VoxelGrid vis = raytrace_voxels(occ, sensor_at(0.0, 0.0, 6.0), {});
  EXPECT_EQ(vis[vis.spec.flat({15, 5}, 0)], 1.0f);
}

// Exact oracle: a voxel is hidden iff the segment from the sensor to its
// center crosses the interior of another occupied voxel.
TEST(RaytraceVoxels, AgreesWithSegmentBoxOracle) {
  std::mt19937_64 rng(103);
  const VoxelGridSpec spec{{0.0, 0.0, 12, 12, 1.0}, 0.0, 4.0, 8};
  std::uniform_real_distribution<double> xy(0.0, 12.0), z(0.0, 8.0);
  std::size_t agree = 0, total = 0;
  for (int trial = 0; trial < 30; ++trial) {
    VoxelGrid occ(spec, 0.0f);
    std::bernoulli_distribution hit(0.04);
    std::vector<OrientedBox> boxes;
    std::vector<std::size_t> index;
    for (int j = 0; j < 12; ++j) {
      for (int i = 0; i < 12; ++i) {
        for (int k = 0; k < 8; ++k) {
          if (!hit(rng)) continue;
          occ[spec.flat({i, j}, k)] = 1.0f;
          const Vec3 c = spec.voxel_center({i, j}, k);
          boxes.push_back({OrientedRect{c.head<2>(), 0.0, 1.0, 1.0}, c.z() - 0.25, 0.5});
          index.push_back(spec.flat({i, j}, k));
        }
      }
    }
    const SensorPose s = sensor_at(xy(rng), xy(rng), z(rng));
    const VoxelGrid vis = raytrace_voxels(occ, s, {});
    for (int j = 0; j < 12; ++j) {
      for (int i = 0; i < 12; ++i) {
        for (int k = 0; k < 8; ++k) {
          const std::size_t target = spec.flat({i, j}, k);
          bool visible = true;
          for (std::size_t b = 0; b < boxes.size() && visible; ++b) {
            if (index[b] == target) continue;
            if (boxes[b].contains(s.position())) continue;  // the sensor's own voxel
            if (segment_blocked(s.position(), spec.voxel_center({i, j}, k), boxes[b], 1e-9)) {
              visible = false;
            }
          }
          agree += (vis[target] == 1.0f) == visible;
          ++total;
        }
      }
    }
  }
  EXPECT_GE(static_cast<double>(agree) / total, 0.999);
}

// ---- squash

TEST(Squash, Means) {
  VoxelGrid vis(volume(), 1.0f);
  EXPECT_EQ(squash_z_average(vis).values, std::vector<float>(300, 1.0f));
  for (std::size_t c = 0; c < 300; ++c) {
    for (int k = 0; k < 4; ++k) vis[c * 8 + k] = 0.0f;
  }
  const VisibilityGrid2D half = squash_z_average(vis);
  for (float v : half.values) EXPECT_FLOAT_EQ(v, 0.5f);
  // Only the upper band.
  for (float v : squash_z_average(vis, 2.0, 4.0).values) EXPECT_FLOAT_EQ(v, 1.0f);
  EXPECT_THROW(squash_z_average(vis, 5.0, 6.0), Error);
}

TEST(Squash, MatchesColumnMean) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  VoxelGrid vis(volume());
  for (float& v : vis.values) v = unit(rng);
  const VisibilityGrid2D out = squash_z_average(vis, 0.0, 4.0);
  for (std::size_t c = 0; c < 300; ++c) {
    double sum = 0.0;
    for (int k = 0; k < 8; ++k) sum += vis[c * 8 + k];
    EXPECT_NEAR(out.values[c], sum / 8.0, 1e-6);
    EXPECT_TRUE(out.fov_mask[c]);
  }
}

// ---- object visibility

TEST(ObjectVisibility, ThresholdSemantics) {
  const GridSpec2D spec{0.0, 0.0, 10, 10, 1.0};
  const ObjectState car = make_object(1, 5.0, 5.0, {2.0, 2.0, 1.5});  // cells 4..5 x 4..5
  VisibilityGrid2D vis(spec, 0.0f);
  EXPECT_FALSE(object_visibility(vis, car));
  vis.values[spec.flat({5, 4})] = 1.0f;
  EXPECT_TRUE(object_visibility(vis, car));
  vis.fov_mask[spec.flat({5, 4})] = 0;
  EXPECT_FALSE(object_visibility(vis, car));

  VisibilityGrid2D grey(spec, 0.6f);
  EXPECT_TRUE(object_visibility(grey, car, 0.5));
  EXPECT_FALSE(object_visibility(grey, car, 0.7));
}

TEST(ObjectVisibility, TouchingCellDoesNotCount) {
  const GridSpec2D spec{0.0, 0.0, 10, 10, 1.0};
  const ObjectState car = make_object(1, 5.0, 5.0, {2.0, 2.0, 1.5});
  VisibilityGrid2D vis(spec, 0.0f);
  vis.values[spec.flat({6, 5})] = 1.0f;  // shares only an edge with the footprint
  EXPECT_FALSE(object_visibility(vis, car));
}

TEST(ObjectVisibility, OutsideGridThrows) {
  const GridSpec2D spec{0.0, 0.0, 10, 10, 1.0};
  VisibilityGrid2D vis(spec, 1.0f);
  EXPECT_THROW(object_visibility(vis, make_object(1, 50.0, 5.0)), Error);
}

}  // namespace
}  // namespace sensorvis
