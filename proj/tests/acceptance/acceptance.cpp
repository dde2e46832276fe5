// Acceptance runner. Every criterion prints one PASS or FAIL line; the process
// exits nonzero if any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sensorvis/estimators.hpp"
#include "sensorvis/io.hpp"
#include "sensorvis/metrics.hpp"
#include "sensorvis/simulator.hpp"
#include "sensorvis/visibility.hpp"
#include "test_support.hpp"

namespace sv = sensorvis;
using sv::testing::dense_los;
using sv::testing::random_occupancy;

namespace {

// ---------------------------------------------------------------- tolerances

constexpr double kC1MinAgreement = 0.99;
constexpr double kC1MaxSeconds = 10.0;
constexpr double kC1CornerTolerance = 0.01;  // fraction of a cell
constexpr int kC2Samples = 1000;
constexpr double kC3MaxFir = 0.05;
constexpr double kC3MaxSeconds = 60.0;
constexpr double kC6Tolerance = 0.005;
constexpr double kC7Low = 0.89;
constexpr double kC7High = 0.91;
constexpr std::size_t kC7MinVisible = 10000;
constexpr int kC8Mutations = 500;
constexpr double kC9GridQuantum = 1.0 / 32768.0;
constexpr double kC10MaxFvr = 0.05;
constexpr double kC10MaxFir = 0.10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double value_or(const std::optional<sv::Ratio>& r, double fallback) {
  return r ? r->value() : fallback;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Fine reference configuration shared by the closed-loop criteria.
sv::EstimatorConfig fine_reference(const sv::SensorPose& sensor) {
  sv::EstimatorConfig ec;
  ec.sensor = sensor;
  ec.output = {0.0, -12.0, 480, 96, 0.25};
  ec.spherical.r_min = 0.0;
  ec.spherical.r_max = 130.0;
  ec.spherical.n_range = 130;
  ec.spherical.azimuth_min = -sv::kPi / 2.0;
  ec.spherical.azimuth_max = sv::kPi / 2.0;
  ec.spherical.n_azimuth = 720;
  ec.spherical.elevation_min = sv::deg2rad(-80.0);
  ec.spherical.elevation_max = sv::deg2rad(10.0);
  ec.spherical.n_elevation = 360;
  ec.reference_margin = 0.15;
  return ec;
}

sv::MetricsReport run_and_evaluate(sv::EstimatorKind kind, const sv::EstimatorConfig& ec,
                                   const std::vector<sv::Frame>& frames,
                                   const sv::DetectionSource& src, double vis_threshold = 0.5) {
  auto estimator = sv::make_estimator(kind, ec);
  const auto grids = sv::run_estimator(*estimator, frames);
  return sv::evaluate_run(grids, frames, src, vis_threshold);
}

// ---------------------------------------------------------------- criterion 1

// True when the segment from `a` to `b` passes within `tol` of a grid corner.
bool grazes_corner(const sv::GridSpec2D& s, const sv::Vec2& a, const sv::Vec2& b, double tol) {
  const sv::Vec2 d = b - a;
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(d[axis]) < 1e-12) continue;
    const double origin = axis == 0 ? s.origin_x : s.origin_y;
    const double other_origin = axis == 0 ? s.origin_y : s.origin_x;
    const double lo = std::min(a[axis], b[axis]);
    const double hi = std::max(a[axis], b[axis]);
    for (int k = static_cast<int>(std::ceil((lo - origin) / s.resolution));
         origin + k * s.resolution <= hi; ++k) {
      const double t = (origin + k * s.resolution - a[axis]) / d[axis];
      const double o = a[1 - axis] + t * d[1 - axis];
      const double frac = (o - other_origin) / s.resolution;
      if (std::abs(frac - std::round(frac)) * s.resolution <= tol) return true;
    }
  }
  return false;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 20.0);
  const sv::GridSpec2D spec{0.0, 0.0, 20, 20, 1.0};
  std::size_t agree = 0, total = 0, ties = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const sv::Grid2D occ = random_occupancy(spec, rng, 0.15);
    const sv::SensorPose s = sv::testing::sensor_at(pos(rng), pos(rng), 1.0, 100.0);
    const sv::VisibilityGrid2D vis = sv::raytrace_2d(occ, s, s.fov, {});
    for (std::size_t k = 0; k < spec.cell_count(); ++k) {
      if (!vis.fov_mask[k]) continue;
      const bool oracle = dense_los(occ, s.ground(), spec.unflat(k), {});
      ++total;
      if ((vis.values[k] == 1.0f) == oracle) {
        ++agree;
      } else if (grazes_corner(spec, s.ground(), sv::cell_center(spec, spec.unflat(k)),
                               kC1CornerTolerance * spec.resolution)) {
        ++ties;
      }
    }
  }
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(agree) / total;
  const std::size_t other = total - agree - ties;
  return {rate >= kC1MinAgreement && other == 0 && secs < kC1MaxSeconds,
          fmt("agreement %.5f over %zu cells (min %.2f), %zu corner ties, %zu other "
              "disagreements, %.2f s",
              rate, total, kC1MinAgreement, ties, other, secs)};
}

// ---------------------------------------------------------------- criterion 2

using i128 = __int128;

bool same_ratio(const sv::Ratio& r, std::uint64_t num, std::uint64_t den) {
  return static_cast<i128>(r.num) * den == static_cast<i128>(num) * r.den;
}

bool sums_to_one(const sv::Ratio& a, const sv::Ratio& b) {
  return static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den ==
         static_cast<i128>(a.den) * b.den;
}

Outcome criterion2() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::uint64_t> big(0, 1ULL << 40);
  std::uniform_int_distribution<int> pick(0, 5);
  int failures = 0, identities = 0;
  auto draw = [&] { return pick(rng) == 0 ? 0 : big(rng); };
  for (int n = 0; n < kC2Samples; ++n) {
    const sv::ConfusionCounts c{draw(), draw(), draw(), draw()};
    const sv::Rates r = sv::rates(c);
    const bool pos = c.tv + c.fi > 0;
    const bool neg = c.fv + c.ti > 0;
    if (r.tvr.has_value() != pos || r.fir.has_value() != pos) ++failures;
    if (r.fvr.has_value() != neg || r.tir.has_value() != neg) ++failures;
    if (pos) {
      failures += !same_ratio(*r.tvr, c.tv, c.tv + c.fi);
      failures += !same_ratio(*r.fir, c.fi, c.tv + c.fi);
      failures += !sums_to_one(*r.tvr, *r.fir);
      ++identities;
    }
    if (neg) {
      failures += !same_ratio(*r.fvr, c.fv, c.fv + c.ti);
      failures += !same_ratio(*r.tir, c.ti, c.fv + c.ti);
      failures += !sums_to_one(*r.fvr, *r.tir);
      ++identities;
    }
  }
  // FVR is FV / (FV + TI): TV and FI must not enter it.
  const sv::Rates a = sv::rates({0, 3, 1, 0});
  const sv::Rates b = sv::rates({500, 3, 1, 77});
  const bool construction = a.fvr && b.fvr && same_ratio(*a.fvr, 3, 4) && same_ratio(*b.fvr, 3, 4);
  return {failures == 0 && construction,
          fmt("%d samples, %d identities checked exactly, %d mismatches, FVR construction %s",
              kC2Samples, identities, failures, construction ? "ok" : "wrong")};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  sv::SceneConfig sc;
  sc.vehicle_count = 20;
  sc.speed = {8.0, 16.0};
  sc.radar.fov.max_range = 200.0;
  const sv::GroundTruthLog log = sv::generate_scene(sc);
  sv::DetectionSource src;
  src.sensor = sc.radar;
  const sv::MetricsReport rep =
      run_and_evaluate(sv::EstimatorKind::kReference, fine_reference(sc.radar), log.frames, src);
  const double secs = seconds_since(t0);
  const double fir = value_or(rep.rates.fir, 1.0);
  return {rep.counts.fv == 0 && fir <= kC3MaxFir && secs < kC3MaxSeconds,
          fmt("%zu frames, TV %llu FV %llu TI %llu FI %llu, FIR %.4f (max %.2f), %.1f s",
              log.frames.size(), static_cast<unsigned long long>(rep.counts.tv),
              static_cast<unsigned long long>(rep.counts.fv),
              static_cast<unsigned long long>(rep.counts.ti),
              static_cast<unsigned long long>(rep.counts.fi), fir, kC3MaxFir, secs)};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4() {
  sv::SceneConfig sc;
  sc.vehicle_count = 20;
  sc.truck_ratio = 0.5;
  sc.speed = {8.0, 16.0};
  sc.radar.fov.max_range = 130.0;
  sc.radar.fov.elevation_min = sv::deg2rad(-15.0);
  sc.radar.fov.elevation_max = sv::deg2rad(10.0);
  sc.radar_model.deterministic = false;
  sc.radar_model.min_returns = 30;
  sc.radar_model.max_returns = 60;
  sc.radar_model.position_sigma = 0.1;
  sc.radar_model.doppler_sigma = 0.1;
  const sv::GroundTruthLog log = sv::generate_scene(sc);

  sv::EstimatorConfig ec;
  ec.sensor = sc.radar;
  ec.output = {0.0, -12.0, 120, 24, 1.0};
  ec.spherical.r_max = 130.0;
  ec.spherical.n_range = 130;
  ec.spherical.n_azimuth = 180;
  ec.spherical.elevation_min = sv::deg2rad(-15.0);
  ec.spherical.elevation_max = sv::deg2rad(10.0);
  ec.spherical.n_elevation = 25;
  ec.ism.sigma_range = 0.5;
  ec.ism.sigma_azimuth = sv::deg2rad(1.0);
  ec.ism.sigma_elevation = sv::deg2rad(1.0);
  ec.ism.covariance = Eigen::Matrix2d::Identity() * 0.5;
  sv::DetectionSource src;
  src.sensor = sc.radar;

  const auto r2 = run_and_evaluate(sv::EstimatorKind::kRadar2D, ec, log.frames, src);
  const auto r3 = run_and_evaluate(sv::EstimatorKind::kRadar3D, ec, log.frames, src);
  const double fvr2 = value_or(r2.rates.fvr, 1.0), fvr3 = value_or(r3.rates.fvr, 1.0);
  const double fir2 = value_or(r2.rates.fir, 1.0), fir3 = value_or(r3.rates.fir, 1.0);
  const bool defined = r2.rates.fvr && r3.rates.fvr && r2.rates.fir && r3.rates.fir;
  return {defined && fvr3 < fvr2 && fir3 < fir2,
          fmt("radar2d FVR %.3f FIR %.3f, radar3d FVR %.3f FIR %.3f", fvr2, fir2, fvr3, fir3)};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
  const sv::SensorPose radar{0.0, 0.0, 6.0, 0.0, 0.0, {}};
  std::vector<sv::Frame> frames;
  for (int f = 0; f < 20; ++f) {
    sv::Frame fr;
    fr.t = f * 0.1;
    sv::ObjectState occluder = sv::testing::make_object(0, 20.0, 0.0, {4.0, 2.0, 2.0}, 0.0,
                                                        "obstacle");
    sv::ObjectState car = sv::testing::make_object(1, 60.0, 0.0, {4.5, 1.8, 1.5});
    occluder.t = car.t = fr.t;
    fr.objects = {occluder, car};
    frames.push_back(fr);
  }
  const auto returns = sv::simulate_radar(frames, radar, sv::RadarDetectionModel{}, 1);
  for (std::size_t f = 0; f < frames.size(); ++f) frames[f].radar = returns[f];

  sv::EstimatorConfig ec;
  ec.sensor = radar;
  sv::DetectionSource src;
  src.sensor = radar;
  auto last_outcome = [&](sv::EstimatorKind kind) -> std::optional<sv::Outcome> {
    const auto rep = run_and_evaluate(kind, ec, frames, src);
    for (const sv::EventRecord& e : rep.events) {
      if (e.object_id == 1 && std::abs(e.t - frames.back().t) < 1e-9) return e.outcome;
    }
    return std::nullopt;
  };
  const auto o2 = last_outcome(sv::EstimatorKind::kRadar2D);
  const auto o3 = last_outcome(sv::EstimatorKind::kRadar3D);
  const bool detected = sv::detection_status(frames.back().objects[1], frames.back(), src);
  auto name = [](const std::optional<sv::Outcome>& o) {
    return o ? std::string(sv::to_string(*o)) : std::string("none");
  };
  return {detected && o2 == sv::Outcome::kFalseInvisible && o3 == sv::Outcome::kTrueVisible,
          fmt("car behind 2 m occluder detected=%d, radar2d %s, radar3d %s", detected,
              name(o2).c_str(), name(o3).c_str())};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6() {
  sv::SceneConfig sc;
  sc.vehicle_count = 40;
  sc.truck_ratio = 0.3;
  sc.speed = {8.0, 16.0};
  sc.seed = 6;
  const sv::GroundTruthLog log = sv::generate_scene(sc);
  std::size_t total = 0, occluded = 0;
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    const auto& objs = log.frames[f].objects;
    for (std::size_t k = 0; k < objs.size(); ++k) {
      if (!sv::in_evaluation_fov(objs[k], sc.radar)) continue;
      ++total;
      occluded += log.occluded[f][k];
    }
  }
  sv::DetectionSource src;
  src.sensor = sc.radar;
  const auto coverage = sv::coverage_rate(log.frames, src);
  const double x = static_cast<double>(occluded) / total;
  const double cov = value_or(coverage, -1.0);
  return {coverage && std::abs(cov - (1.0 - x)) <= kC6Tolerance,
          fmt("%zu object-frames, oracle occluded %.4f, coverage %.4f, 1 - occluded %.4f "
              "(tolerance %.3f)",
              total, x, cov, 1.0 - x, kC6Tolerance)};
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion7() {
  sv::SceneConfig sc;
  sc.duration = 120.0;
  sc.vehicle_count = 100;
  sc.truck_ratio = 0.2;
  sc.speed = {5.0, 10.0};
  sc.seed = 7;
  sc.radar.fov.max_range = 200.0;
  sc.radar_model.deterministic = false;
  sc.radar_model.p_detect_visible = 0.9;
  const sv::GroundTruthLog log = sv::generate_scene(sc);
  sv::DetectionSource src;
  src.sensor = sc.radar;
  std::size_t visible = 0, detected = 0;
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    const auto& objs = log.frames[f].objects;
    for (std::size_t k = 0; k < objs.size(); ++k) {
      if (log.occluded[f][k] || !sv::in_evaluation_fov(objs[k], sc.radar)) continue;
      ++visible;
      detected += sv::detection_status(objs[k], log.frames[f], src);
    }
  }
  const double ratio = static_cast<double>(detected) / visible;
  // The gap a perfect estimator cannot close; reported only.
  const auto rep =
      run_and_evaluate(sv::EstimatorKind::kReference, fine_reference(sc.radar), log.frames, src);
  return {visible >= kC7MinVisible && ratio >= kC7Low && ratio <= kC7High,
          fmt("detection ratio %.4f over %zu visible object-frames (range [%.2f, %.2f]); "
              "reference estimator FVR %.4f",
              ratio, visible, kC7Low, kC7High, value_or(rep.rates.fvr, -1.0))};
}

// ---------------------------------------------------------------- criterion 8

template <class Grid, class Trace>
int count_enlargements(Grid occ, std::mt19937_64& rng, Trace trace) {
  std::uniform_int_distribution<std::size_t> cell(0, occ.size() - 1);
  std::uniform_real_distribution<float> bump(0.0f, 1.0f);
  auto before = trace(occ);
  int violations = 0;
  for (int m = 0; m < kC8Mutations; ++m) {
    const std::size_t k = cell(rng);
    occ[k] = std::min(1.0f, occ[k] + bump(rng));
    const auto after = trace(occ);
    for (std::size_t c = 0; c < after.values.size(); ++c) {
      if (after.values[c] == 1.0f && before.values[c] != 1.0f) {
        ++violations;
        break;
      }
    }
    before = after;
  }
  return violations;
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  const sv::OccupancyThreshold thr;

  const sv::GridSpec2D g2{0.0, -20.0, 40, 40, 1.0};
  const sv::SensorPose s2 = sv::testing::sensor_at(0.3, 0.1, 1.0, 60.0, sv::deg2rad(80.0));
  const int v2 = count_enlargements(random_occupancy(g2, rng, 0.02), rng,
                                    [&](const sv::Grid2D& occ) {
                                      return sv::raytrace_2d(occ, s2, s2.fov, thr);
                                    });

  sv::SphericalGridSpec gs;
  gs.r_max = 60.0;
  gs.n_range = 60;
  gs.n_azimuth = 36;
  gs.elevation_min = -0.5;
  gs.elevation_max = 0.1;
  gs.n_elevation = 12;
  sv::SphericalGrid sph(gs, 0.0f);
  const int vs = count_enlargements(sph, rng, [&](const sv::SphericalGrid& occ) {
    return sv::raytrace_spherical(occ, thr);
  });

  const sv::VoxelGridSpec gv{{0.0, -10.0, 30, 20, 1.0}, 0.0, 4.0, 8};
  const sv::VoxelGrid vox(gv, 0.0f);
  const sv::SensorPose s3 = sv::testing::sensor_at(0.0, 0.0, 6.0);
  const int vv = count_enlargements(vox, rng, [&](const sv::VoxelGrid& occ) {
    return sv::raytrace_voxels(occ, s3, thr);
  });
  return {v2 == 0 && vs == 0 && vv == 0,
          fmt("%d mutations each; enlargements 2D %d, spherical %d, voxel %d", kC8Mutations, v2,
              vs, vv)};
}

// ---------------------------------------------------------------- criterion 9

template <class G>
double grid_round_trip_error(const G& g, bool& exact_spec) {
  std::stringstream s;
  sv::save_grid({g, 1.25}, s);
  const sv::GridSnapshot back = sv::load_grid(s);
  const G& got = std::get<G>(back.grid);
  exact_spec = exact_spec && got.spec == g.spec && back.timestamp == 1.25 &&
               got.values.size() == g.values.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < g.values.size() && k < got.values.size(); ++k) {
    worst = std::max(worst, std::abs(static_cast<double>(got.values[k]) - g.values[k]));
  }
  return worst;
}

Outcome criterion9() {
  sv::SceneConfig sc;
  sc.duration = 20.0;
  sc.vehicle_count = 25;
  sc.camera_enabled = true;
  sc.radar_model.deterministic = false;
  sc.radar_model.min_returns = 2;
  sc.radar_model.max_returns = 6;
  sc.radar_model.position_sigma = 0.2;
  sc.radar_model.clutter_rate = 1.5;
  const sv::GroundTruthLog log = sv::generate_scene(sc);

  // Measurement log.
  const sv::MeasurementLog mlog = sv::measurement_log_from_frames(log.frames);
  std::stringstream ms;
  sv::save_measurement_log(mlog, ms);
  const bool measurements_ok = sv::load_measurement_log(ms) == mlog;

  // Labels, exact, then the reconstruction of the trajectories.
  const sv::LabelFile labels = sv::labels_from_frames(log.frames);
  std::stringstream ls;
  sv::save_labels(labels, ls);
  const sv::LabelFile labels_back = sv::load_labels(ls);
  const bool labels_ok = labels_back == labels;
  std::vector<double> times;
  for (const sv::Frame& f : log.frames) times.push_back(f.t);
  const auto rebuilt = sv::labels_to_objects(labels_back, times, {});
  double worst_position = 0.0;
  std::size_t matched = 0, expected = 0;
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    std::map<int, const sv::ObjectState*> by_id;
    for (const sv::ObjectState& o : rebuilt[f]) by_id[o.id] = &o;
    for (const sv::ObjectState& o : log.frames[f].objects) {
      ++expected;
      const auto it = by_id.find(o.id);
      if (it == by_id.end()) continue;
      ++matched;
      worst_position = std::max(worst_position, std::hypot(it->second->x - o.x,
                                                           it->second->y - o.y));
    }
  }
  const double resolution = sv::EstimatorConfig{}.output.resolution;

  // Grids of every kind.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  auto fill = [&](auto g) {
    for (float& v : g.values) v = u(rng);
    return g;
  };
  bool spec_ok = true;
  double grid_err = 0.0;
  grid_err = std::max(grid_err, grid_round_trip_error(fill(sv::Grid2D({0, -12, 120, 24, 1.0})),
                                                      spec_ok));
  grid_err = std::max(grid_err, grid_round_trip_error(fill(sv::PolarGrid(sv::PolarGridSpec{})),
                                                      spec_ok));
  grid_err = std::max(grid_err, grid_round_trip_error(
                                    fill(sv::SphericalGrid(sv::SphericalGridSpec{})), spec_ok));
  grid_err = std::max(grid_err,
                      grid_round_trip_error(fill(sv::VoxelGrid(sv::EstimatorConfig{}.voxel_spec())),
                                            spec_ok));
  sv::VisibilityGrid2D vis({0, -12, 120, 24, 1.0});
  for (float& v : vis.values) v = u(rng);
  for (auto& m : vis.fov_mask) m = u(rng) < 0.8f;
  grid_err = std::max(grid_err, grid_round_trip_error(vis, spec_ok));

  // Report from a real evaluation.
  sv::EstimatorConfig ec;
  ec.sensor = sc.radar;
  sv::DetectionSource src;
  src.sensor = sc.radar;
  sv::ReportFile report{"radar2d", {{"seed", sc.seed}}, {}};
  report.report = run_and_evaluate(sv::EstimatorKind::kRadar2D, ec, log.frames, src);
  std::stringstream rs;
  sv::save_report(report, rs);
  const bool report_ok = sv::load_report(rs) == report;

  const bool pass = measurements_ok && labels_ok && report_ok && spec_ok &&
                    grid_err <= kC9GridQuantum && matched == expected && matched > 0 &&
                    worst_position <= resolution / 2.0;
  return {pass, fmt("measurements %s, labels %s, reports %s, grid specs %s, grid max error %.3g "
                    "(max %.3g), label reconstruction %zu/%zu states, max error %.3g m (max %.2f)",
                    measurements_ok ? "exact" : "DIFFER", labels_ok ? "exact" : "DIFFER",
                    report_ok ? "exact" : "DIFFER", spec_ok ? "exact" : "DIFFER", grid_err,
                    kC9GridQuantum, matched, expected, worst_position, resolution / 2.0)};
}

// --------------------------------------------------------------- criterion 10

Outcome criterion10() {
  sv::SceneConfig sc;
  sc.vehicle_count = 60;
  sc.truck_ratio = 0.1;
  sc.speed = {5.0, 10.0};
  sc.camera_enabled = true;
  sc.seed = 1;
  const sv::GroundTruthLog log = sv::generate_scene(sc);

  sv::EstimatorConfig ec;
  ec.sensor = sc.camera;
  ec.homography = sc.camera_model.ground_homography(sc.camera);
  ec.image_width = sc.camera_model.image_width;
  ec.image_height = sc.camera_model.image_height;
  ec.output = {0.0, -12.0, 240, 48, 0.5};
  ec.voxel_layers = 8;
  ec.squash_z_lo = 0.0;
  ec.squash_z_hi = 4.0;
  ec.camera_decay.decay_rate = 0.001;
  ec.camera_heading_prior = 0.0;

  sv::DetectionSource src;
  src.sensor = sc.camera;
  src.tolerance.mode = sv::AssociationMode::kCamera;
  src.tolerance.position_radius = 0.5;
  src.homography = sv::Homography(ec.homography);
  constexpr double kVisThreshold = 0.8;
  const auto rep =
      run_and_evaluate(sv::EstimatorKind::kCamera3D, ec, log.frames, src, kVisThreshold);
  const double fvr = value_or(rep.rates.fvr, 1.0), fir = value_or(rep.rates.fir, 1.0);
  return {rep.rates.fvr && rep.rates.fir && fvr <= kC10MaxFvr && fir <= kC10MaxFir,
          fmt("camera3d TV %llu FV %llu TI %llu FI %llu, FVR %.4f (max %.2f), FIR %.4f (max "
              "%.2f)",
              static_cast<unsigned long long>(rep.counts.tv),
              static_cast<unsigned long long>(rep.counts.fv),
              static_cast<unsigned long long>(rep.counts.ti),
              static_cast<unsigned long long>(rep.counts.fi), fvr, kC10MaxFvr, fir,
              kC10MaxFir)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 raytracer oracle equivalence", criterion1},
      {"2 metric identities", criterion2},
      {"3 closed-loop zero-error", criterion3},
      {"4 radar3d vs radar2d ordering", criterion4},
      {"5 over-the-top geometry", criterion5},
      {"6 coverage rate", criterion6},
      {"7 stochastic sanity", criterion7},
      {"8 monotonicity", criterion8},
      {"9 round trips", criterion9},
      {"10 camera pipeline", criterion10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
