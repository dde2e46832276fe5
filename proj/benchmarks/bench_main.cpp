#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sensorvis/estimators.hpp"
#include "sensorvis/sensor_models.hpp"
#include "sensorvis/simulator.hpp"
#include "sensorvis/visibility.hpp"

namespace sv = sensorvis;

namespace {

sv::SensorPose mast() {
  sv::SensorPose s;
  s.z = 6.0;
  s.fov.max_range = 130.0;
  return s;
}

template <class G>
G sparse_occupancy(const typename std::decay_t<decltype(G::spec)>& spec, double density) {
  G g(spec, 0.0f);
  std::mt19937_64 rng(42);
  std::bernoulli_distribution occ(density);
  for (float& v : g.values) v = occ(rng) ? 1.0f : 0.0f;
  return g;
}

void BM_Raytrace2D(benchmark::State& state) {
  const double res = 1.0 / static_cast<double>(state.range(0));
  const sv::GridSpec2D spec{0.0, -12.0, static_cast<int>(120 / res), static_cast<int>(24 / res),
                            res};
  const auto occ = sparse_occupancy<sv::Grid2D>(spec, 0.01);
  const sv::SensorPose s = mast();
  for (auto _ : state) benchmark::DoNotOptimize(sv::raytrace_2d(occ, s, s.fov, {}));
  state.counters["cells"] = static_cast<double>(spec.cell_count());
}
BENCHMARK(BM_Raytrace2D)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

sv::SphericalGridSpec sphere(int az_per_deg) {
  sv::SphericalGridSpec s;
  s.r_max = 130.0;
  s.n_range = 130;
  s.n_azimuth = 180 * az_per_deg;
  s.elevation_min = sv::deg2rad(-15.0);
  s.elevation_max = sv::deg2rad(10.0);
  s.n_elevation = 25 * az_per_deg;
  return s;
}

void BM_RaytraceSpherical(benchmark::State& state) {
  const auto occ = sparse_occupancy<sv::SphericalGrid>(sphere(state.range(0)), 0.002);
  for (auto _ : state) benchmark::DoNotOptimize(sv::raytrace_spherical(occ, {}));
}
BENCHMARK(BM_RaytraceSpherical)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_FirstHitsAndSlice(benchmark::State& state) {
  const auto occ = sparse_occupancy<sv::SphericalGrid>(sphere(state.range(0)), 0.002);
  const sv::SensorPose s = mast();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sv::slice_first_hits(sv::first_hits(occ, {}), s, 1.0));
  }
}
BENCHMARK(BM_FirstHitsAndSlice)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_RaytraceVoxels(benchmark::State& state) {
  const double res = 1.0 / static_cast<double>(state.range(0));
  const sv::VoxelGridSpec spec{
      {0.0, -12.0, static_cast<int>(120 / res), static_cast<int>(24 / res), res}, 0.0, 4.0, 8};
  const auto occ = sparse_occupancy<sv::VoxelGrid>(spec, 0.005);
  const sv::SensorPose s = mast();
  for (auto _ : state) benchmark::DoNotOptimize(sv::raytrace_voxels(occ, s, {}));
}
BENCHMARK(BM_RaytraceVoxels)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

std::vector<sv::Measurement> returns(int n, double x_min = 5.0) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(x_min, 115.0), y(-11.0, 11.0), z(0.0, 3.0);
  std::vector<sv::Measurement> out(n);
  for (auto& m : out) m.position = sv::CartesianPosition{x(rng), y(rng), z(rng)};
  return out;
}

void BM_IsmCartesian(benchmark::State& state) {
  sv::Grid2D grid(sv::GridSpec2D{0.0, -12.0, 120, 24, 1.0});
  const auto zs = returns(static_cast<int>(state.range(0)));
  const sv::SensorPose s = mast();
  const sv::IsmConfig cfg;
  for (auto _ : state) {
    for (const auto& z : zs) sv::ism_update_cartesian(grid, z, s, cfg);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IsmCartesian)->Arg(64)->Arg(512);

void BM_IsmSpherical(benchmark::State& state) {
  sv::SphericalGrid grid(sphere(1));
  const sv::SensorPose s = mast();
  std::vector<sv::Measurement> zs;
  // Far enough out to stay above the lowest elevation bin.
  for (const auto& m : returns(static_cast<int>(state.range(0)), 30.0)) zs.push_back(sv::to_polar(m, s));
  sv::IsmConfig cfg;
  cfg.sigma_azimuth = cfg.sigma_elevation = sv::deg2rad(1.0);
  for (auto _ : state) {
    for (const auto& z : zs) sv::ism_update_spherical(grid, z, cfg);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IsmSpherical)->Arg(64)->Arg(512);

void BM_VoxelizeBoxes(benchmark::State& state) {
  const sv::VoxelGridSpec spec{{0.0, -12.0, 240, 48, 0.5}, 0.0, 4.0, 8};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(5.0, 115.0), y(-10.0, 10.0), yaw(-0.3, 0.3);
  std::vector<sv::BoundingBox3D> boxes(state.range(0));
  for (auto& b : boxes) b = {x(rng), y(rng), yaw(rng), {4.5, 1.8, 1.5}, "car"};
  for (auto _ : state) {
    sv::VoxelGrid grid(spec);
    sv::voxelize_boxes(grid, boxes, 0.9);
    benchmark::DoNotOptimize(grid.values.data());
  }
}
BENCHMARK(BM_VoxelizeBoxes)->Arg(10)->Arg(40);

void BM_Radar3DStep(benchmark::State& state) {
  sv::SceneConfig sc;
  sc.duration = 2.0;
  sc.radar_model.deterministic = false;
  sc.radar_model.min_returns = 30;
  sc.radar_model.max_returns = 60;
  const auto frames = sv::generate_scene(sc).frames;
  sv::EstimatorConfig ec;
  ec.sensor = sc.radar;
  for (auto _ : state) {
    auto est = sv::make_estimator(sv::EstimatorKind::kRadar3D, ec);
    benchmark::DoNotOptimize(sv::run_estimator(*est, frames));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(frames.size()));
}
BENCHMARK(BM_Radar3DStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
