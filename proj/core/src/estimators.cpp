#include "sensorvis/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sensorvis/error.hpp"

namespace sensorvis {
namespace {

constexpr char kModule[] = "visibility-estimators";

// Half-open bin index of v, unclamped.
int raw_bin(double v, double lo, double step) {
  return static_cast<int>(std::floor((v - lo) / step));
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kRadar2D:
      return "radar2d";
    case EstimatorKind::kRadar3D:
      return "radar3d";
    case EstimatorKind::kCamera3D:
      return "camera3d";
    case EstimatorKind::kReference:
      return "reference";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (EstimatorKind k : {EstimatorKind::kRadar2D, EstimatorKind::kRadar3D,
                          EstimatorKind::kCamera3D, EstimatorKind::kReference}) {
    if (to_string(k) == name) return k;
  }
  throw Error(kModule, ErrorKind::kInvalidArgument,
              "unknown estimator '" + std::string(name) + "'");
}

void EstimatorConfig::validate() const {
  output.validate();
  sensor.validate();
  filter.validate();
  ism.validate();
  decay.validate();
  camera_decay.validate();
  threshold.validate();
  spherical.validate();
  voxel_spec().validate();
  if (reference_margin < 0.0) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "reference margin must be non-negative");
  }
  if (!(occupied_value > 0.5 && occupied_value <= 1.0)) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "camera occupied value must lie in (0.5, 1]");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw Error(kModule, ErrorKind::kInvalidArgument, "image size must be positive");
  }
  if (squash_z_lo > squash_z_hi) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "squash band must satisfy lo <= hi");
  }
}

// ---------------------------------------------------------------------------

Radar2DEstimator::Radar2DEstimator(const EstimatorConfig& cfg)
    : cfg_(cfg), occupancy_(cfg.output, static_cast<float>(cfg.ism.occupancy_prior)) {
  cfg_.validate();
}

VisibilityGrid2D Radar2DEstimator::run(std::span<const Measurement> frame,
                                       double dt) {
  const auto kept = preprocess_radar(frame, cfg_.filter, cfg_.sensor);
  if (dt > 0.0) apply_decay(occupancy_, dt, cfg_.decay);
  for (const Measurement& z : kept) {
    ism_update_cartesian(occupancy_, z, cfg_.sensor, cfg_.ism);
  }
  VisibilityGrid2D vis =
      raytrace_2d(occupancy_, cfg_.sensor, cfg_.sensor.fov, cfg_.threshold);
  for (std::size_t k = 0; k < vis.values.size(); ++k) {
    if (!vis.fov_mask[k]) vis.values[k] = 0.0f;
  }
  return vis;
}

// ---------------------------------------------------------------------------

Radar3DEstimator::Radar3DEstimator(const EstimatorConfig& cfg)
    : cfg_(cfg),
      occupancy_(cfg.spherical, static_cast<float>(cfg.ism.occupancy_prior)) {
  cfg_.validate();
}

VisibilityGrid2D Radar3DEstimator::run(std::span<const Measurement> frame,
                                       double dt) {
  const auto kept = preprocess_radar(frame, cfg_.filter, cfg_.sensor);
  if (dt > 0.0) apply_decay(occupancy_, dt, cfg_.decay);
  for (const Measurement& m : kept) {
    const Measurement z = to_polar(m, cfg_.sensor);
    const auto& p = std::get<PolarPosition>(z.position);
    if (!cfg_.spherical.locate({p.r, p.azimuth, p.elevation})) {
      ++ignored_;
      continue;
    }
    ism_update_spherical(occupancy_, z, cfg_.ism);
  }
  return spherical_visibility_stack(occupancy_, cfg_);
}

// ---------------------------------------------------------------------------

Camera3DEstimator::Camera3DEstimator(const EstimatorConfig& cfg)
    : cfg_(cfg), homography_(cfg.homography), occupancy_(cfg.voxel_spec(), kUnknown) {
  cfg_.validate();
  const Projection proj = projection_from_homography(homography_, cfg_.sensor);
  const VoxelGridSpec& s = occupancy_.spec;
  in_view_.assign(s.cell_count(), 0);
  for (std::size_t c = 0; c < s.base.cell_count(); ++c) {
    const CellIndex cell = s.base.unflat(c);
    for (int k = 0; k < s.n_z; ++k) {
      const Vec3 p = s.voxel_center(cell, k);
      const Eigen::Vector3d q = proj * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
      if (!in_fov_3d(cfg_.sensor, p) || q.z() <= 0.0) continue;
      const double u = q.x() / q.z();
      const double v = q.y() / q.z();
      in_view_[s.flat(cell, k)] =
          u >= 0.0 && u < cfg_.image_width && v >= 0.0 && v < cfg_.image_height;
    }
  }
}

VisibilityGrid2D Camera3DEstimator::run(std::span<const BoundingBox2D> frame,
                                        double dt) {
  if (dt > 0.0) apply_decay(occupancy_, dt, cfg_.camera_decay);
  std::vector<BoundingBox3D> boxes;
  boxes.reserve(frame.size());
  for (const BoundingBox2D& det : frame) {
    try {
      BoundingBox3D b = estimate_box3d(det, homography_, cfg_.size_prior, cfg_.sensor,
                                       cfg_.camera_heading_prior);
      if (cells_overlapping(cfg_.output, b.box().footprint).empty()) {
        ++ignored_;
        continue;
      }
      boxes.push_back(std::move(b));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kData) throw;
      ++ignored_;
    }
  }
  voxelize_boxes(occupancy_, boxes, cfg_.occupied_value);

  VoxelGrid vis3d = raytrace_voxels(occupancy_, cfg_.sensor, cfg_.threshold);
  for (std::size_t k = 0; k < in_view_.size(); ++k) {
    if (!in_view_[k]) vis3d[k] = 0.0f;
  }
  VisibilityGrid2D vis = squash_z_average(vis3d, cfg_.squash_z_lo, cfg_.squash_z_hi);
  vis.fov_mask = fov_mask(cfg_.output, cfg_.sensor);
  return vis;
}

// ---------------------------------------------------------------------------

ReferenceEstimator::ReferenceEstimator(const EstimatorConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
}

VisibilityGrid2D ReferenceEstimator::run(std::span<const ObjectState> objects) {
  return spherical_visibility_stack(
      rasterize_first_hits(cfg_.spherical, cfg_.sensor, objects, cfg_.reference_margin), cfg_);
}

// ---------------------------------------------------------------------------

std::unique_ptr<VisibilityEstimator> make_estimator(EstimatorKind kind,
                                                    const EstimatorConfig& cfg) {
  switch (kind) {
    case EstimatorKind::kRadar2D:
      return std::make_unique<Radar2DEstimator>(cfg);
    case EstimatorKind::kRadar3D:
      return std::make_unique<Radar3DEstimator>(cfg);
    case EstimatorKind::kCamera3D:
      return std::make_unique<Camera3DEstimator>(cfg);
    case EstimatorKind::kReference:
      return std::make_unique<ReferenceEstimator>(cfg);
  }
  throw Error(kModule, ErrorKind::kInternal, "unhandled estimator kind");
}

namespace {

// Calls visit(ia, ie, ir_lo, ir_hi) for every bin-center ray that crosses a
// grown object box, with the range bins covered by the crossing.
template <class Visit>
void for_each_object_hit(const SphericalGridSpec& spec, const SensorPose& sensor,
                         std::span<const ObjectState> objects, double margin, Visit&& visit) {
  const Vec3 origin = sensor.position();
  const Vec2 origin_xy = sensor.ground();
  const double da = spec.azimuth_step();
  const double de = spec.elevation_step();
  const double dr = spec.range_step();

  for (const ObjectState& obj : objects) {
    const OrientedBox box = obj.box().dilated(margin);
    const OrientedRect& fp = box.footprint;

    // Angular bounds of the box as seen from the sensor.
    int ia_lo = 0;
    int ia_hi = spec.n_azimuth - 1;
    const double g_min = fp.distance(origin_xy);
    double g_max = 0.0;
    for (const Vec2& c : fp.corners()) g_max = std::max(g_max, (c - origin_xy).norm());
    if (g_min > 0.0) {
      const double az_c = to_sensor_polar(sensor, fp.center).azimuth;
      double lo = 0.0;
      double hi = 0.0;
      for (const Vec2& c : fp.corners()) {
        const double d = wrap_angle(to_sensor_polar(sensor, c).azimuth - az_c);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      ia_lo = std::max(ia_lo, raw_bin(az_c + lo, spec.azimuth_min, da));
      ia_hi = std::min(ia_hi, raw_bin(az_c + hi, spec.azimuth_min, da));
    }
    double el_lo = kPi;
    double el_hi = -kPi;
    for (double z : {box.base_z, box.top_z()}) {
      for (double g : {g_min, g_max}) {
        const double el = std::atan2(z - origin.z(), g);
        el_lo = std::min(el_lo, el);
        el_hi = std::max(el_hi, el);
      }
    }
    const int ie_lo = std::max(0, raw_bin(el_lo, spec.elevation_min, de));
    const int ie_hi = std::min(spec.n_elevation - 1, raw_bin(el_hi, spec.elevation_min, de));

    for (int ia = ia_lo; ia <= ia_hi; ++ia) {
      for (int ie = ie_lo; ie <= ie_hi; ++ie) {
        const Vec3 dir =
            from_sensor_spherical(sensor, {1.0, spec.azimuth_center(ia),
                                           spec.elevation_center(ie)}) - origin;
        const auto hit = ray_box_overlap(origin, dir, box);
        if (!hit) continue;
        const int ir_lo = std::max(0, raw_bin((*hit)[0], spec.r_min, dr));
        const int ir_hi = std::min(spec.n_range - 1, raw_bin((*hit)[1], spec.r_min, dr));
        if (ir_lo <= ir_hi) visit(ia, ie, ir_lo, ir_hi);
      }
    }
  }
}

}  // namespace

SphericalGrid rasterize_objects_spherical(const SphericalGridSpec& spec,
                                          const SensorPose& sensor,
                                          std::span<const ObjectState> objects,
                                          double margin) {
  SphericalGrid occ(spec, 0.0f);
  for_each_object_hit(spec, sensor, objects, margin, [&](int ia, int ie, int lo, int hi) {
    const std::size_t base = spec.ray_offset(ia, ie);
    for (int ir = lo; ir <= hi; ++ir) occ[base + ir] = 1.0f;
  });
  return occ;
}

FirstHitMap rasterize_first_hits(const SphericalGridSpec& spec, const SensorPose& sensor,
                                 std::span<const ObjectState> objects, double margin) {
  spec.validate();
  FirstHitMap hits{spec, std::vector<int>(spec.ray_count(), spec.n_range)};
  for_each_object_hit(spec, sensor, objects, margin, [&](int ia, int ie, int lo, int) {
    int& first = hits.first[static_cast<std::size_t>(ia) * spec.n_elevation + ie];
    first = std::min(first, lo);
  });
  return hits;
}

namespace {

VisibilityGrid2D finish_stack(const PolarGrid& slice, const EstimatorConfig& cfg) {
  VisibilityGrid2D out = resample_polar_to_cartesian(slice, cfg.sensor, cfg.output);
  const auto mask = fov_mask(cfg.output, cfg.sensor);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.fov_mask[k] = out.fov_mask[k] && mask[k];
    if (!out.fov_mask[k]) out.values[k] = 0.0f;
  }
  return out;
}

}  // namespace

VisibilityGrid2D spherical_visibility_stack(const SphericalGrid& occ,
                                            const EstimatorConfig& cfg) {
  if (cfg.graded) {
    const SphericalGrid vis = raytrace_spherical(occ, cfg.threshold, true);
    return finish_stack(slice_at_height(vis, cfg.sensor, cfg.slice_height, 0.0f), cfg);
  }
  return spherical_visibility_stack(first_hits(occ, cfg.threshold), cfg);
}

VisibilityGrid2D spherical_visibility_stack(const FirstHitMap& hits,
                                            const EstimatorConfig& cfg) {
  return finish_stack(slice_first_hits(hits, cfg.sensor, cfg.slice_height, 0.0f), cfg);
}

std::vector<VisibilityGrid2D> run_estimator(VisibilityEstimator& estimator,
                                            std::span<const Frame> frames) {
  std::vector<VisibilityGrid2D> out;
  out.reserve(frames.size());
  double previous = frames.empty() ? 0.0 : frames.front().t;
  for (const Frame& f : frames) {
    FrameInput in{f.t, f.t - previous, f.radar, f.boxes, f.objects};
    previous = f.t;
    VisibilityGrid2D vis = estimator.estimate(in);
    vis.timestamp = f.t;
    out.push_back(std::move(vis));
  }
  return out;
}

}  // namespace sensorvis
