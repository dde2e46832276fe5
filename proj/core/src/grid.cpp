#include "sensorvis/grid.hpp"

#include <algorithm>
#include <cmath>

#include "sensorvis/error.hpp"

namespace sensorvis {
namespace {

constexpr char kModule[] = "geometry-grids";

void require(bool ok, const char* message) {
  if (!ok) throw Error(kModule, ErrorKind::kInvalidArgument, message);
}

// Half-open bin lookup on [lo, hi) split into n equal bins.
std::optional<int> bin_of(double v, double lo, double hi, int n) {
  if (!(v >= lo && v < hi)) return std::nullopt;
  const int k = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
  return std::clamp(k, 0, n - 1);
}

// floor((p - origin) / res), corrected so that the result agrees with the
// corner coordinates origin + k * res computed in floating point.
long cell_coordinate(double p, double origin, double res) {
  long k = static_cast<long>(std::floor((p - origin) / res));
  if (origin + static_cast<double>(k + 1) * res <= p) ++k;
  if (origin + static_cast<double>(k) * res > p) --k;
  return k;
}

}  // namespace

void GridSpec2D::validate() const {
  require(resolution > 0.0, "grid resolution must be positive");
  require(width > 0 && height > 0, "grid dimensions must be positive");
}

std::optional<CellIndex> world_to_cell(const GridSpec2D& spec, const Vec2& p) {
  const long i = cell_coordinate(p.x(), spec.origin_x, spec.resolution);
  const long j = cell_coordinate(p.y(), spec.origin_y, spec.resolution);
  if (i < 0 || j < 0 || i >= spec.width || j >= spec.height) return std::nullopt;
  return CellIndex{static_cast<int>(i), static_cast<int>(j)};
}

Vec2 cell_center(const GridSpec2D& spec, CellIndex c) {
  return {spec.origin_x + (c.i + 0.5) * spec.resolution,
          spec.origin_y + (c.j + 0.5) * spec.resolution};
}

std::vector<CellIndex> cells_overlapping(const GridSpec2D& spec,
                                         const OrientedRect& footprint) {
  require(footprint.length > 0.0 && footprint.width > 0.0,
          "footprint must have positive length and width");
  const auto corners = footprint.corners();
  double min_x = corners[0].x(), max_x = min_x;
  double min_y = corners[0].y(), max_y = min_y;
  for (const Vec2& c : corners) {
    min_x = std::min(min_x, c.x());
    max_x = std::max(max_x, c.x());
    min_y = std::min(min_y, c.y());
    max_y = std::max(max_y, c.y());
  }
  const double res = spec.resolution;
  const long i0 = std::max<long>(0, cell_coordinate(min_x, spec.origin_x, res));
  const long i1 = std::min<long>(spec.width - 1,
                                 cell_coordinate(max_x, spec.origin_x, res));
  const long j0 = std::max<long>(0, cell_coordinate(min_y, spec.origin_y, res));
  const long j1 = std::min<long>(spec.height - 1,
                                 cell_coordinate(max_y, spec.origin_y, res));

  // Separating-axis test with strictly positive overlap on every axis.
  const double eps = 1e-9 * res;
  const Vec2 u = footprint.axis_u();
  const Vec2 v = footprint.axis_v();
  const double hu = footprint.length / 2.0;
  const double hv = footprint.width / 2.0;
  const double cu = footprint.center.dot(u);
  const double cv = footprint.center.dot(v);

  std::vector<CellIndex> out;
  for (long j = j0; j <= j1; ++j) {
    const double y0 = spec.origin_y + j * res;
    const double y1 = y0 + res;
    if (std::min(y1, max_y) - std::max(y0, min_y) <= eps) continue;
    for (long i = i0; i <= i1; ++i) {
      const double x0 = spec.origin_x + i * res;
      const double x1 = x0 + res;
      if (std::min(x1, max_x) - std::max(x0, min_x) <= eps) continue;
      const Vec2 cell_corners[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      double lo_u = cell_corners[0].dot(u), hi_u = lo_u;
      double lo_v = cell_corners[0].dot(v), hi_v = lo_v;
      for (const Vec2& c : cell_corners) {
        lo_u = std::min(lo_u, c.dot(u));
        hi_u = std::max(hi_u, c.dot(u));
        lo_v = std::min(lo_v, c.dot(v));
        hi_v = std::max(hi_v, c.dot(v));
      }
      if (std::min(hi_u, cu + hu) - std::max(lo_u, cu - hu) <= eps) continue;
      if (std::min(hi_v, cv + hv) - std::max(lo_v, cv - hv) <= eps) continue;
      out.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
  }
  return out;
}

void PolarGridSpec::validate() const {
  require(r_min >= 0.0 && r_min < r_max, "polar range bounds are invalid");
  require(azimuth_min < azimuth_max, "polar azimuth bounds are not ordered");
  require(n_range > 0 && n_azimuth > 0, "polar bin counts must be positive");
}

std::optional<std::size_t> PolarGridSpec::locate(double range,
                                                 double azimuth) const {
  const auto ir = bin_of(range, r_min, r_max, n_range);
  const auto ia = bin_of(azimuth, azimuth_min, azimuth_max, n_azimuth);
  if (!ir || !ia) return std::nullopt;
  return flat(*ir, *ia);
}

void SphericalGridSpec::validate() const {
  require(r_min >= 0.0 && r_min < r_max, "spherical range bounds are invalid");
  require(azimuth_min < azimuth_max, "spherical azimuth bounds are not ordered");
  require(elevation_min < elevation_max,
          "spherical elevation bounds are not ordered");
  require(n_range > 0 && n_azimuth > 0 && n_elevation > 0,
          "spherical bin counts must be positive");
}

std::optional<SphericalBin> SphericalGridSpec::locate(
    const SphericalCoord& s) const {
  const auto ir = bin_of(s.range, r_min, r_max, n_range);
  const auto ia = bin_of(s.azimuth, azimuth_min, azimuth_max, n_azimuth);
  const auto ie = bin_of(s.elevation, elevation_min, elevation_max, n_elevation);
  if (!ir || !ia || !ie) return std::nullopt;
  return SphericalBin{*ir, *ia, *ie};
}

void VoxelGridSpec::validate() const {
  base.validate();
  require(z_min < z_max, "voxel z bounds are not ordered");
  require(n_z > 0, "voxel layer count must be positive");
}

PolarGrid slice_at_height(const SphericalGrid& grid, const SensorPose& sensor,
                          double h, float unknown) {
  const SphericalGridSpec& s = grid.spec;
  if (s.n_elevation <= 0) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "cannot slice a spherical grid without elevation bins");
  }
  PolarGrid out(s.ground_polar(), unknown);
  const double dz = h - sensor.z;
  for (int ir = 0; ir < s.n_range; ++ir) {
    const double ground = s.range_center(ir);
    const double slant = std::hypot(ground, dz);
    const double elevation = std::atan2(dz, ground);
    for (int ia = 0; ia < s.n_azimuth; ++ia) {
      const auto bin = s.locate({slant, s.azimuth_center(ia), elevation});
      if (bin) out[out.spec.flat(ir, ia)] = grid[s.flat(*bin)];
    }
  }
  return out;
}

VisibilityGrid2D resample_polar_to_cartesian(const PolarGrid& polar,
                                             const SensorPose& sensor,
                                             const GridSpec2D& target) {
  target.validate();
  VisibilityGrid2D out(target, kUnknown, false);
  for (std::size_t k = 0; k < target.cell_count(); ++k) {
    const PolarCoord pc =
        to_sensor_polar(sensor, cell_center(target, target.unflat(k)));
    const auto bin = polar.spec.locate(pc.range, pc.azimuth);
    if (!bin) continue;
    out.values[k] = polar[*bin];
    out.fov_mask[k] = 1;
  }
  return out;
}

std::vector<std::uint8_t> fov_mask(const GridSpec2D& spec,
                                   const SensorPose& sensor) {
  std::vector<std::uint8_t> mask(spec.cell_count(), 0);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    mask[k] = in_fov_2d(sensor, cell_center(spec, spec.unflat(k))) ? 1 : 0;
  }
  return mask;
}

}  // namespace sensorvis
