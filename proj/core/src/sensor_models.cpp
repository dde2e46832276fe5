#include "sensorvis/sensor_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sensorvis/error.hpp"
#include "sensorvis/traversal.hpp"

namespace sensorvis {
namespace {

constexpr char kModule[] = "sensor-models";

void require(bool ok, const char* message) {
  if (!ok) throw Error(kModule, ErrorKind::kInvalidArgument, message);
}

float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }

}  // namespace

Vec3 world_position(const Measurement& m, const SensorPose& sensor) {
  if (const auto* c = std::get_if<CartesianPosition>(&m.position)) {
    return {c->x, c->y, c->z};
  }
  const auto& p = std::get<PolarPosition>(m.position);
  return from_sensor_spherical(sensor, {p.r, p.azimuth, p.elevation});
}

Measurement to_cartesian(const Measurement& m, const SensorPose& sensor) {
  Measurement out = m;
  const Vec3 w = world_position(m, sensor);
  out.position = CartesianPosition{w.x(), w.y(), w.z()};
  return out;
}

Measurement to_polar(const Measurement& m, const SensorPose& sensor) {
  if (m.is_polar()) return m;
  Measurement out = m;
  const SphericalCoord s = to_sensor_spherical(sensor, world_position(m, sensor));
  out.position = PolarPosition{s.range, s.azimuth, s.elevation};
  return out;
}

void RadarFilterConfig::validate() const {
  require(elevation.well_ordered(), "elevation filter bounds are not ordered");
  require(rcs.well_ordered(), "rcs filter bounds are not ordered");
  require(min_abs_doppler >= 0.0, "min_abs_doppler must be non-negative");
}

std::vector<Measurement> preprocess_radar(std::span<const Measurement> in,
                                          const RadarFilterConfig& cfg,
                                          const SensorPose& sensor) {
  cfg.validate();
  std::vector<Measurement> out;
  out.reserve(in.size());
  for (const Measurement& m : in) {
    if (m.quality < cfg.min_quality) continue;
    if (!cfg.rcs.contains(m.rcs)) continue;
    if (std::abs(m.doppler) < cfg.min_abs_doppler) continue;
    const double elevation =
        m.is_polar() ? std::get<PolarPosition>(m.position).elevation
                     : to_sensor_spherical(sensor, world_position(m, sensor))
                           .elevation;
    if (!cfg.elevation.contains(elevation)) continue;
    out.push_back(m);
  }
  return out;
}

void IsmConfig::validate() const {
  require(peak_occupancy > 0.0 && peak_occupancy <= 1.0,
          "peak_occupancy must lie in (0, 1]");
  require(peak_occupancy > occupancy_prior,
          "peak_occupancy must exceed the prior");
  require(covariance(0, 0) > 0.0 && covariance.determinant() > 0.0 &&
              std::abs(covariance(0, 1) - covariance(1, 0)) < 1e-12,
          "covariance must be symmetric positive definite");
  require(sigma_range > 0.0 && sigma_azimuth > 0.0 && sigma_elevation > 0.0,
          "spherical sigmas must be positive");
  require(free_space_decrement >= 0.0 && free_space_decrement < 1.0,
          "free_space_decrement must lie in [0, 1)");
}

std::vector<CellDelta> ism_evidence_cartesian(const GridSpec2D& spec,
                                              const Measurement& z,
                                              const SensorPose& sensor,
                                              const IsmConfig& cfg) {
  if (!z.is_cartesian()) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "cartesian inverse sensor model needs a cartesian measurement");
  }
  cfg.validate();
  const auto& c = std::get<CartesianPosition>(z.position);
  const Vec2 pos(c.x, c.y);
  const Eigen::Matrix2d info = cfg.covariance.inverse();
  // Axis-aligned bound of the 3-sigma ellipse.
  const double rx = 3.0 * std::sqrt(cfg.covariance(0, 0));
  const double ry = 3.0 * std::sqrt(cfg.covariance(1, 1));
  const double res = spec.resolution;
  const int i0 = std::max(0, static_cast<int>(std::floor((pos.x() - rx - spec.origin_x) / res)));
  const int i1 = std::min(spec.width - 1, static_cast<int>(std::floor((pos.x() + rx - spec.origin_x) / res)));
  const int j0 = std::max(0, static_cast<int>(std::floor((pos.y() - ry - spec.origin_y) / res)));
  const int j1 = std::min(spec.height - 1, static_cast<int>(std::floor((pos.y() + ry - spec.origin_y) / res)));

  const double gain = cfg.peak_occupancy - cfg.occupancy_prior;
  std::vector<CellDelta> occupied;
  std::unordered_set<std::size_t> support;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Vec2 d = cell_center(spec, {i, j}) - pos;
      const double m = d.dot(info * d);
      if (m > 9.0) continue;
      const std::size_t k = spec.flat({i, j});
      support.insert(k);
      occupied.push_back({k, static_cast<float>(gain * std::exp(-0.5 * m))});
    }
  }

  std::vector<CellDelta> out;
  const float free = -static_cast<float>(cfg.free_space_decrement);
  if (free != 0.0f) {
    traverse_cells(spec, sensor.ground(), pos,
                   [&](CellIndex cell, double, double) {
                     const std::size_t k = spec.flat(cell);
                     if (support.contains(k)) return false;
                     out.push_back({k, free});
                     return true;
                   });
  }
  out.insert(out.end(), occupied.begin(), occupied.end());
  return out;
}

std::vector<CellDelta> ism_evidence_spherical(const SphericalGridSpec& spec,
                                              const Measurement& z,
                                              const IsmConfig& cfg) {
  if (!z.is_polar()) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "spherical inverse sensor model needs a polar measurement");
  }
  cfg.validate();
  const auto& p = std::get<PolarPosition>(z.position);
  const auto own = spec.locate({p.r, p.azimuth, p.elevation});
  if (!own) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "measurement lies outside the spherical grid");
  }
  const int na = static_cast<int>(std::ceil(3.0 * cfg.sigma_azimuth / spec.azimuth_step()));
  const int ne = static_cast<int>(std::ceil(3.0 * cfg.sigma_elevation / spec.elevation_step()));
  const int nr = static_cast<int>(std::ceil(3.0 * cfg.sigma_range / spec.range_step()));
  const double gain = cfg.peak_occupancy - cfg.occupancy_prior;
  const float free = -static_cast<float>(cfg.free_space_decrement);
  const double free_limit = p.r - 3.0 * cfg.sigma_range;

  std::vector<CellDelta> out;
  for (int ia = std::max(0, own->azimuth - na);
       ia <= std::min(spec.n_azimuth - 1, own->azimuth + na); ++ia) {
    const double da = (spec.azimuth_center(ia) - p.azimuth) / cfg.sigma_azimuth;
    for (int ie = std::max(0, own->elevation - ne);
         ie <= std::min(spec.n_elevation - 1, own->elevation + ne); ++ie) {
      const double de =
          (spec.elevation_center(ie) - p.elevation) / cfg.sigma_elevation;
      const double m_angle = da * da + de * de;
      const bool own_ray = ia == own->azimuth && ie == own->elevation;
      if (m_angle > 9.0 && !own_ray) continue;
      const std::size_t ray = spec.ray_offset(ia, ie);
      if (free != 0.0f) {
        for (int ir = 0; ir < spec.n_range && spec.range_center(ir) < free_limit;
             ++ir) {
          out.push_back({ray + ir, free});
        }
      }
      for (int ir = std::max(0, own->range - nr);
           ir <= std::min(spec.n_range - 1, own->range + nr); ++ir) {
        const double dr = (spec.range_center(ir) - p.r) / cfg.sigma_range;
        const double m = m_angle + dr * dr;
        if (m > 9.0) continue;
        out.push_back({ray + ir, static_cast<float>(gain * std::exp(-0.5 * m))});
      }
    }
  }
  return out;
}

void apply_evidence(std::span<float> values, std::span<const CellDelta> deltas) {
  for (const CellDelta& d : deltas) {
    values[d.index] = clamp01(values[d.index] + d.delta);
  }
}

void ism_update_cartesian(Grid2D& grid, const Measurement& z,
                          const SensorPose& sensor, const IsmConfig& cfg) {
  apply_evidence(grid.span(), ism_evidence_cartesian(grid.spec, z, sensor, cfg));
}

void ism_update_spherical(SphericalGrid& grid, const Measurement& z,
                          const IsmConfig& cfg) {
  apply_evidence(grid.span(), ism_evidence_spherical(grid.spec, z, cfg));
}

void DecayConfig::validate() const {
  require(decay_rate >= 0.0 && decay_rate <= 1.0,
          "decay_rate must lie in [0, 1]");
}

void apply_decay(std::span<float> values, double dt, const DecayConfig& cfg) {
  cfg.validate();
  require(dt >= 0.0, "decay time step must be non-negative");
  const double factor = std::pow(cfg.decay_rate, dt);
  if (factor == 1.0) return;
  const float f = static_cast<float>(factor);
  for (float& v : values) v = kUnknown + (v - kUnknown) * f;
}

void BoundingBox2D::validate() const {
  require(u_max > u_min && v_max > v_min, "2D box corners are not ordered");
}

OrientedBox BoundingBox3D::box() const {
  return OrientedBox{
      OrientedRect{Vec2(x, y), yaw, extent.length, extent.width}, 0.0,
      extent.height};
}

Homography::Homography(const Eigen::Matrix3d& image_to_ground)
    : h_(image_to_ground) {
  const double scale = h_.cwiseAbs().maxCoeff();
  require(scale > 0.0 && std::abs(h_.determinant()) > 1e-12 * scale * scale * scale,
          "homography must be invertible");
  inverse_ = h_.inverse();
}

namespace {

std::optional<Vec2> dehomogenize(const Eigen::Vector3d& p) {
  const double scale = std::max({std::abs(p.x()), std::abs(p.y()), 1.0});
  if (std::abs(p.z()) < 1e-12 * scale) return std::nullopt;
  return Vec2(p.x() / p.z(), p.y() / p.z());
}

}  // namespace

std::optional<Vec2> Homography::to_ground(double u, double v) const {
  return dehomogenize(h_ * Eigen::Vector3d(u, v, 1.0));
}

std::optional<Vec2> Homography::to_image(const Vec2& ground) const {
  return dehomogenize(inverse_ * Eigen::Vector3d(ground.x(), ground.y(), 1.0));
}

namespace {

constexpr std::array<std::pair<int, int>, 12> kBoxEdges{{{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                                         {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                                         {0, 4}, {1, 5}, {2, 6}, {3, 7}}};

// With the yaw known, slides the box along the ground line under the bottom
// edge (its lowest corner lies on that line) until its projection best matches
// the detection's column range and bottom row. Residuals are viewing angles, not
// pixels, so boxes of objects cut by the near plane do not dominate the fit.
Vec2 fit_center(const BoundingBox2D& box, const Projection& proj, const Vec2& a,
                const Vec2& b, const Extent& extent, double yaw, const SensorPose& pose) {
  const Eigen::Matrix3d k = proj.leftCols<3>() * camera_rotation(pose).transpose();
  auto col_angle = [&](double px) { return std::atan((px - k(0, 2)) / k(0, 0)); };
  auto row_angle = [&](double px) { return std::atan((px - k(1, 2)) / k(1, 1)); };
  const Vec2 camera = pose.ground();
  const Vec2 u(std::cos(yaw), std::sin(yaw));
  const Vec2 v(-std::sin(yaw), std::cos(yaw));
  auto center_at = [&](double t) {
    const Vec2 p = a + t * (b - a);
    const Vec2 d = p - camera;
    const double su = u.dot(d) < 0.0 ? -1.0 : 1.0;
    const double sv = v.dot(d) < 0.0 ? -1.0 : 1.0;
    return Vec2(p + su * (extent.length / 2.0) * u + sv * (extent.width / 2.0) * v);
  };
  auto cost_at = [&](const Vec2& c) {
    const OrientedBox ob{OrientedRect{c, yaw, extent.length, extent.width}, 0.0,
                         extent.height};
    const auto r = project_box_bounds(proj, ob);
    if (!r) return std::numeric_limits<double>::infinity();
    const double du0 = col_angle((*r)[0]) - col_angle(box.u_min);
    const double du1 = col_angle((*r)[2]) - col_angle(box.u_max);
    const double dv0 = row_angle((*r)[1]) - row_angle(box.v_min);
    const double dv1 = row_angle((*r)[3]) - row_angle(box.v_max);
    return du0 * du0 + du1 * du1 + dv0 * dv0 + dv1 * dv1;
  };

  // Coarse scan, then a finer one around the best coarse sample.
  double best_t = 0.5;
  double best = cost_at(center_at(best_t));
  double lo = -1.0;
  double hi = 2.0;
  for (int pass = 0; pass < 2; ++pass) {
    constexpr int kSteps = 120;
    const double step = (hi - lo) / kSteps;
    for (int k = 0; k <= kSteps; ++k) {
      const double t = lo + k * step;
      const double c = cost_at(center_at(t));
      if (c < best) {
        best = c;
        best_t = t;
      }
    }
    lo = best_t - step;
    hi = best_t + step;
  }

  // The lowest corner is off that line when the near plane cuts the box, so
  // finish with a compass search over the ground position.
  Vec2 center = center_at(best_t);
  constexpr double kSteps[] = {4.0, 1.0, 0.25, 0.05, 0.01};
  for (double step : kSteps) {
    for (bool moved = true; moved;) {
      moved = false;
      for (const Vec2& d : {Vec2(step, 0.0), Vec2(-step, 0.0), Vec2(0.0, step), Vec2(0.0, -step)}) {
        const double c = cost_at(center + d);
        if (c < best) {
          best = c;
          center += d;
          moved = true;
        }
      }
    }
  }
  return center;
}

}  // namespace

BoundingBox3D estimate_box3d(const BoundingBox2D& box, const Homography& h,
                             const SizePrior& size_prior,
                             const std::optional<SensorPose>& camera,
                             std::optional<double> yaw_prior) {
  box.validate();
  const auto prior = size_prior.find(box.label);
  if (prior == size_prior.end()) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "no size prior for class '" + box.label + "'");
  }
  const auto bottom = h.to_ground(0.5 * (box.u_min + box.u_max), box.v_max);
  const auto left = h.to_ground(box.u_min, box.v_max);
  const auto right = h.to_ground(box.u_max, box.v_max);
  if (!bottom || !left || !right) {
    throw Error(kModule, ErrorKind::kData,
                "2D box projects to infinity on the ground plane");
  }
  const Vec2 edge = *right - *left;
  // The box is symmetric, so yaw is only defined modulo pi.
  double yaw = wrap_angle(std::atan2(edge.y(), edge.x()) + kPi / 2.0);
  if (yaw > kPi / 2.0) yaw -= kPi;
  if (yaw <= -kPi / 2.0) yaw += kPi;

  BoundingBox3D out;
  out.x = bottom->x();
  out.y = bottom->y();
  out.yaw = yaw;
  out.extent = prior->second;
  out.label = box.label;
  if (camera && yaw_prior) {
    out.yaw = wrap_angle(*yaw_prior);
    const Vec2 c = fit_center(box, projection_from_homography(h, *camera), *left, *right,
                              out.extent, out.yaw, *camera);
    out.x = c.x();
    out.y = c.y();
  } else if (camera) {
    Vec2 axis(std::cos(yaw), std::sin(yaw));
    if (axis.dot(*bottom - camera->ground()) < 0.0) axis = -axis;
    const Vec2 c = *bottom + axis * (out.extent.length / 2.0);
    out.x = c.x();
    out.y = c.y();
  }
  return out;
}

void voxelize_boxes(VoxelGrid& grid, std::span<const BoundingBox3D> boxes,
                    double occupied_value) {
  require(occupied_value > 0.5 && occupied_value <= 1.0,
          "occupied_value must lie in (0.5, 1]");
  const VoxelGridSpec& s = grid.spec;
  const float gain = static_cast<float>(occupied_value - kUnknown);
  std::vector<std::uint8_t> hit(s.cell_count(), 0);
  for (const BoundingBox3D& b : boxes) {
    const OrientedBox box = b.box();
    // Boxes overlapping each other still raise a voxel once.
    for (const CellIndex c : cells_overlapping(s.base, box.footprint)) {
      for (int k = 0; k < s.n_z; ++k) {
        if (box.contains(s.voxel_center(c, k))) hit[s.flat(c, k)] = 1;
      }
    }
  }
  for (std::size_t k = 0; k < hit.size(); ++k) {
    if (hit[k]) grid[k] = clamp01(grid[k] + gain);
  }
}

Eigen::Matrix3d camera_rotation(const SensorPose& pose) {
  const double cy = std::cos(pose.yaw);
  const double sy = std::sin(pose.yaw);
  const double cp = std::cos(pose.pitch);
  const double sp = std::sin(pose.pitch);
  const Vec3 forward(cp * cy, cp * sy, sp);
  const Vec3 right(sy, -cy, 0.0);
  const Vec3 down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return r;
}

Projection projection_from_homography(const Homography& h, const SensorPose& camera) {
  const Eigen::Matrix3d r = camera_rotation(camera);
  const Vec3 t = -r * camera.position();
  Eigen::Matrix3d g;
  g.col(0) = r.col(0);
  g.col(1) = r.col(1);
  g.col(2) = t;
  // h^-1 = s K [r1 r2 t]; the bottom row of K is (0, 0, 1), which fixes s.
  Eigen::Matrix3d k = h.matrix().inverse() * g.inverse();
  if (std::abs(k(2, 2)) < 1e-12 * k.cwiseAbs().maxCoeff()) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "homography does not match the camera pose");
  }
  k /= k(2, 2);
  Projection p;
  p.leftCols<3>() = k * r;
  p.col(3) = k * t;
  return p;
}

std::optional<std::array<double, 4>> project_box_bounds(const Projection& p,
                                                        const OrientedBox& box,
                                                        double near) {
  std::array<Eigen::Vector3d, 8> img;
  const auto corners = box.corners();
  for (int i = 0; i < 8; ++i) img[i] = p * corners[i].homogeneous();
  std::array<double, 4> out{std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity()};
  bool any = false;
  auto add = [&](const Eigen::Vector3d& q) {
    const double u = q.x() / q.z();
    const double v = q.y() / q.z();
    out[0] = std::min(out[0], u);
    out[1] = std::min(out[1], v);
    out[2] = std::max(out[2], u);
    out[3] = std::max(out[3], v);
    any = true;
  };
  for (const auto& q : img) {
    if (q.z() >= near) add(q);
  }
  // Projection is linear in homogeneous coordinates, so edge points crossing
  // the near plane can be interpolated after projecting.
  for (const auto& [i, j] : kBoxEdges) {
    const double di = img[i].z() - near;
    const double dj = img[j].z() - near;
    if (di * dj < 0.0) add(img[i] + (img[j] - img[i]) * (di / (di - dj)));
  }
  if (!any) return std::nullopt;
  return out;
}

}  // namespace sensorvis
