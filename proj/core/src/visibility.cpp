#include "sensorvis/visibility.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "sensorvis/error.hpp"
#include "sensorvis/traversal.hpp"

namespace sensorvis {
namespace {

constexpr char kModule[] = "visibility-estimators";

}  // namespace

void OccupancyThreshold::validate() const {
  if (!(occupied_above > 0.5 && occupied_above <= 1.0)) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "occupancy threshold must lie in (0.5, 1]");
  }
}

VisibilityGrid2D raytrace_2d(const Grid2D& occ, const SensorPose& sensor,
                             const FovSpec& fov, OccupancyThreshold thr) {
  thr.validate();
  const GridSpec2D& spec = occ.spec;
  SensorPose local = sensor;
  local.fov = fov;
  const Vec2 origin = sensor.ground();
  const std::optional<CellIndex> sensor_cell = world_to_cell(spec, origin);

  VisibilityGrid2D out(spec, 0.0f, false);
  for (std::size_t k = 0; k < spec.cell_count(); ++k) {
    const CellIndex target = spec.unflat(k);
    const Vec2 center = cell_center(spec, target);
    if (!in_fov_2d(local, center)) continue;
    out.fov_mask[k] = 1;
    bool blocked = false;
    traverse_cells(spec, origin, center, [&](CellIndex c, double, double) {
      if (c == target) return false;
      if (sensor_cell && c == *sensor_cell) return true;
      if (thr.blocks(occ[spec.flat(c)])) {
        blocked = true;
        return false;
      }
      return true;
    });
    out.values[k] = blocked ? 0.0f : 1.0f;
  }
  return out;
}

SphericalGrid raytrace_spherical(const SphericalGrid& occ,
                                 OccupancyThreshold thr, bool graded) {
  thr.validate();
  const SphericalGridSpec& s = occ.spec;
  SphericalGrid out;
  out.spec = s;
  out.values.assign(s.cell_count(), 0.0f);
  for (std::size_t ray = 0; ray < s.ray_count(); ++ray) {
    const std::size_t base = ray * s.n_range;
    if (graded) {
      float transmission = 1.0f;
      for (int ir = 0; ir < s.n_range; ++ir) {
        out[base + ir] = transmission;
        transmission *= 1.0f - std::max(0.0f, 2.0f * occ[base + ir] - 1.0f);
      }
    } else {
      int ir = 0;
      for (; ir < s.n_range; ++ir) {
        out[base + ir] = 1.0f;
        if (thr.blocks(occ[base + ir])) break;
      }
    }
  }
  return out;
}

FirstHitMap first_hits(const SphericalGrid& occ, OccupancyThreshold thr) {
  thr.validate();
  const SphericalGridSpec& s = occ.spec;
  FirstHitMap out{s, std::vector<int>(s.ray_count(), s.n_range)};
  for (std::size_t ray = 0; ray < s.ray_count(); ++ray) {
    const std::size_t base = ray * s.n_range;
    for (int ir = 0; ir < s.n_range; ++ir) {
      if (thr.blocks(occ[base + ir])) {
        out.first[ray] = ir;
        break;
      }
    }
  }
  return out;
}

PolarGrid slice_first_hits(const FirstHitMap& hits, const SensorPose& sensor, double h,
                           float unknown) {
  const SphericalGridSpec& s = hits.spec;
  s.validate();
  PolarGrid out(s.ground_polar(), unknown);
  const double dz = h - sensor.z;
  for (int ir = 0; ir < s.n_range; ++ir) {
    const double ground = s.range_center(ir);
    const double slant = std::hypot(ground, dz);
    const double elevation = std::atan2(dz, ground);
    for (int ia = 0; ia < s.n_azimuth; ++ia) {
      const auto bin = s.locate({slant, s.azimuth_center(ia), elevation});
      if (!bin) continue;
      out[out.spec.flat(ir, ia)] = bin->range <= hits.at(bin->azimuth, bin->elevation) ? 1.0f : 0.0f;
    }
  }
  return out;
}

namespace {

// Bit set of the layers overlapped with positive length by the height
// interval [z_lo, z_hi]; a degenerate interval selects the containing layer.
std::uint64_t layer_bits(const VoxelGridSpec& s, double z_lo, double z_hi) {
  if (z_lo > z_hi) std::swap(z_lo, z_hi);
  const double dz = s.z_step();
  int first = 0;
  int last = 0;
  if (z_hi - z_lo < 1e-12) {
    if (z_lo < s.z_min || z_lo >= s.z_max) return 0;
    first = last = static_cast<int>(std::floor((z_lo - s.z_min) / dz));
  } else {
    if (z_hi <= s.z_min || z_lo >= s.z_max) return 0;
    first = static_cast<int>(std::floor((z_lo - s.z_min) / dz));
    last = static_cast<int>(std::ceil((z_hi - s.z_min) / dz)) - 1;
  }
  first = std::clamp(first, 0, s.n_z - 1);
  last = std::clamp(last, 0, s.n_z - 1);
  if (first > last) return 0;
  const int count = last - first + 1;
  const std::uint64_t run =
      count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
  return run << first;
}

struct PathEntry {
  std::size_t column;
  std::uint64_t occupied;
  double t_in;
  double t_out;
};

}  // namespace

VoxelGrid raytrace_voxels(const VoxelGrid& occ, const SensorPose& sensor,
                          OccupancyThreshold thr) {
  thr.validate();
  const VoxelGridSpec& s = occ.spec;
  if (s.n_z > 64) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "voxel raytracing supports at most 64 layers");
  }
  const GridSpec2D& base = s.base;
  VoxelGrid out;
  out.spec = s;
  out.values.assign(s.cell_count(), 1.0f);

  // Occupied layers of every column as a bit set.
  std::vector<std::uint64_t> column_bits(base.cell_count(), 0);
  bool any = false;
  for (std::size_t c = 0; c < base.cell_count(); ++c) {
    for (int k = 0; k < s.n_z; ++k) {
      if (thr.blocks(occ[c * s.n_z + k])) {
        column_bits[c] |= std::uint64_t{1} << k;
        any = true;
      }
    }
  }
  if (!any) return out;

  const Vec3 origin = sensor.position();
  const Vec2 origin_xy = sensor.ground();
  const std::optional<CellIndex> sensor_cell = world_to_cell(base, origin_xy);
  std::optional<std::size_t> sensor_column;
  std::uint64_t sensor_bit = 0;
  if (sensor_cell) {
    sensor_column = base.flat(*sensor_cell);
    if (origin.z() >= s.z_min && origin.z() < s.z_max) {
      sensor_bit = std::uint64_t{1}
                   << static_cast<int>(std::floor((origin.z() - s.z_min) / s.z_step()));
    }
  }

  std::vector<PathEntry> path;
  for (std::size_t c = 0; c < base.cell_count(); ++c) {
    const CellIndex target = base.unflat(c);
    path.clear();
    traverse_cells(base, origin_xy, cell_center(base, target),
                   [&](CellIndex cell, double t_in, double t_out) {
                     const std::size_t col = base.flat(cell);
                     std::uint64_t bits = column_bits[col];
                     if (sensor_column && col == *sensor_column) {
                       bits &= ~sensor_bit;
                     }
                     if (bits != 0) path.push_back({col, bits, t_in, t_out});
                     return true;
                   });
    if (path.empty()) continue;
    for (int k = 0; k < s.n_z; ++k) {
      const double z_target = s.z_center(k);
      const double dz = z_target - origin.z();
      bool blocked = false;
      for (const PathEntry& e : path) {
        std::uint64_t bits =
            e.occupied & layer_bits(s, origin.z() + e.t_in * dz,
                                    origin.z() + e.t_out * dz);
        if (e.column == c) bits &= ~(std::uint64_t{1} << k);
        if (bits != 0) {
          blocked = true;
          break;
        }
      }
      if (blocked) out[s.flat(target, k)] = 0.0f;
    }
  }
  return out;
}

VisibilityGrid2D squash_z_average(const VoxelGrid& vis3d, double z_lo,
                                  double z_hi) {
  const VoxelGridSpec& s = vis3d.spec;
  std::vector<int> layers;
  for (int k = 0; k < s.n_z; ++k) {
    const double zc = s.z_center(k);
    if (zc >= z_lo && zc <= z_hi) layers.push_back(k);
  }
  if (layers.empty()) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "no voxel layer lies inside the height band");
  }
  VisibilityGrid2D out(s.base, 0.0f, true);
  for (std::size_t c = 0; c < s.base.cell_count(); ++c) {
    double sum = 0.0;
    for (int k : layers) sum += vis3d[c * s.n_z + k];
    out.values[c] = static_cast<float>(sum / static_cast<double>(layers.size()));
  }
  return out;
}

bool object_visibility(const VisibilityGrid2D& vis, const ObjectState& obj,
                       double vis_threshold) {
  const auto cells = cells_overlapping(vis.spec, obj.footprint());
  if (cells.empty()) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "object footprint lies outside the grid");
  }
  return std::any_of(cells.begin(), cells.end(), [&](CellIndex c) {
    return vis.in_fov(c) && vis.at(c) >= vis_threshold;
  });
}

}  // namespace sensorvis
