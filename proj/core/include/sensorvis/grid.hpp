#ifndef SENSORVIS_GRID_HPP_
#define SENSORVIS_GRID_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sensorvis/geometry.hpp"

namespace sensorvis {

// Occupancy or visibility of a cell nobody has evidence about.
inline constexpr float kUnknown = 0.5f;

struct CellIndex {
  int i = 0;  // along x
  int j = 0;  // along y

  auto operator<=>(const CellIndex&) const = default;
};

// Square-celled Cartesian grid. Cell (i, j) covers the half-open rectangle
// [origin_x + i*res, origin_x + (i+1)*res) x [origin_y + j*res, ...).
struct GridSpec2D {
  double origin_x = 0.0;
  double origin_y = 0.0;
  int width = 1;
  int height = 1;
  double resolution = 1.0;

  void validate() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool contains(CellIndex c) const {
    return c.i >= 0 && c.j >= 0 && c.i < width && c.j < height;
  }
  std::size_t flat(CellIndex c) const {
    return static_cast<std::size_t>(c.j) * width + c.i;
  }
  CellIndex unflat(std::size_t k) const {
    return {static_cast<int>(k % width), static_cast<int>(k / width)};
  }
  double max_x() const { return origin_x + width * resolution; }
  double max_y() const { return origin_y + height * resolution; }

  bool operator==(const GridSpec2D&) const = default;
};

std::optional<CellIndex> world_to_cell(const GridSpec2D& spec, const Vec2& p);
Vec2 cell_center(const GridSpec2D& spec, CellIndex c);

// Cells whose square intersects `footprint` with positive area, in row-major
// order. Throws when the footprint is degenerate.
std::vector<CellIndex> cells_overlapping(const GridSpec2D& spec,
                                         const OrientedRect& footprint);

// Range x azimuth bins around a sensor. Range is the ground distance.
struct PolarGridSpec {
  double r_min = 0.0;
  double r_max = 100.0;
  int n_range = 100;
  double azimuth_min = -kPi / 2.0;
  double azimuth_max = kPi / 2.0;
  int n_azimuth = 180;

  void validate() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(n_range) * n_azimuth;
  }
  double range_step() const { return (r_max - r_min) / n_range; }
  double azimuth_step() const { return (azimuth_max - azimuth_min) / n_azimuth; }
  double range_center(int ir) const { return r_min + (ir + 0.5) * range_step(); }
  double azimuth_center(int ia) const {
    return azimuth_min + (ia + 0.5) * azimuth_step();
  }
  std::size_t flat(int ir, int ia) const {
    return static_cast<std::size_t>(ia) * n_range + ir;
  }
  std::optional<std::size_t> locate(double range, double azimuth) const;

  bool operator==(const PolarGridSpec&) const = default;
};

struct SphericalBin {
  int range = 0;
  int azimuth = 0;
  int elevation = 0;

  auto operator<=>(const SphericalBin&) const = default;
};

// Slant range x azimuth x elevation bins around a sensor. Bins along one
// (azimuth, elevation) ray are contiguous in memory.
struct SphericalGridSpec {
  double r_min = 0.0;
  double r_max = 100.0;
  int n_range = 100;
  double azimuth_min = -kPi / 2.0;
  double azimuth_max = kPi / 2.0;
  int n_azimuth = 180;
  double elevation_min = -kPi / 4.0;
  double elevation_max = kPi / 18.0;
  int n_elevation = 55;

  void validate() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(n_range) * n_azimuth * n_elevation;
  }
  std::size_t ray_count() const {
    return static_cast<std::size_t>(n_azimuth) * n_elevation;
  }
  double range_step() const { return (r_max - r_min) / n_range; }
  double azimuth_step() const { return (azimuth_max - azimuth_min) / n_azimuth; }
  double elevation_step() const {
    return (elevation_max - elevation_min) / n_elevation;
  }
  double range_center(int ir) const { return r_min + (ir + 0.5) * range_step(); }
  double azimuth_center(int ia) const {
    return azimuth_min + (ia + 0.5) * azimuth_step();
  }
  double elevation_center(int ie) const {
    return elevation_min + (ie + 0.5) * elevation_step();
  }
  // Offset of the first bin of a ray.
  std::size_t ray_offset(int ia, int ie) const {
    return (static_cast<std::size_t>(ia) * n_elevation + ie) * n_range;
  }
  std::size_t flat(const SphericalBin& b) const {
    return ray_offset(b.azimuth, b.elevation) + b.range;
  }
  SphericalCoord bin_center(const SphericalBin& b) const {
    return {range_center(b.range), azimuth_center(b.azimuth),
            elevation_center(b.elevation)};
  }
  std::optional<SphericalBin> locate(const SphericalCoord& s) const;
  PolarGridSpec ground_polar() const {
    return {r_min, r_max, n_range, azimuth_min, azimuth_max, n_azimuth};
  }

  bool operator==(const SphericalGridSpec&) const = default;
};

// Cartesian voxels stacked over a 2D grid. The voxels of one column are
// contiguous in memory.
struct VoxelGridSpec {
  GridSpec2D base;
  double z_min = 0.0;
  double z_max = 4.0;
  int n_z = 8;

  void validate() const;
  std::size_t cell_count() const { return base.cell_count() * n_z; }
  double z_step() const { return (z_max - z_min) / n_z; }
  double z_center(int k) const { return z_min + (k + 0.5) * z_step(); }
  std::size_t flat(CellIndex c, int k) const {
    return base.flat(c) * n_z + k;
  }
  Vec3 voxel_center(CellIndex c, int k) const {
    const Vec2 xy = cell_center(base, c);
    return {xy.x(), xy.y(), z_center(k)};
  }

  bool operator==(const VoxelGridSpec&) const = default;
};

// Dense field of values over one of the grid domains above.
template <class Spec>
struct ScalarGrid {
  Spec spec;
  std::vector<float> values;

  ScalarGrid() = default;
  explicit ScalarGrid(const Spec& s, float fill = kUnknown)
      : spec(s), values(s.cell_count(), fill) {
    spec.validate();
  }

  std::size_t size() const { return values.size(); }
  float& operator[](std::size_t k) { return values[k]; }
  float operator[](std::size_t k) const { return values[k]; }
  std::span<float> span() { return values; }
  std::span<const float> span() const { return values; }

  bool operator==(const ScalarGrid&) const = default;
};

using Grid2D = ScalarGrid<GridSpec2D>;
using PolarGrid = ScalarGrid<PolarGridSpec>;
using SphericalGrid = ScalarGrid<SphericalGridSpec>;
using VoxelGrid = ScalarGrid<VoxelGridSpec>;

// Per-cell values on the common Cartesian output grid together with the
// static field-of-view mask. Cells outside the mask make no claim.
struct VisibilityGrid2D {
  GridSpec2D spec;
  std::vector<float> values;
  std::vector<std::uint8_t> fov_mask;
  double timestamp = 0.0;

  VisibilityGrid2D() = default;
  explicit VisibilityGrid2D(const GridSpec2D& s, float fill = 0.0f,
                            bool in_fov = true)
      : spec(s),
        values(s.cell_count(), fill),
        fov_mask(s.cell_count(), in_fov ? 1 : 0) {}

  float at(CellIndex c) const { return values[spec.flat(c)]; }
  bool in_fov(CellIndex c) const { return fov_mask[spec.flat(c)] != 0; }

  bool operator==(const VisibilityGrid2D&) const = default;
};

// Picks, for every ground-range x azimuth bin, the elevation bin whose ray
// passes through height `h` above ground at that ground range. Bins whose
// point falls outside the spherical grid get `unknown`.
PolarGrid slice_at_height(const SphericalGrid& grid, const SensorPose& sensor,
                          double h, float unknown = kUnknown);

// Nearest-bin resampling of a ground-polar field onto a Cartesian grid.
// Cells whose center is outside the polar extent are masked out and carry
// kUnknown.
VisibilityGrid2D resample_polar_to_cartesian(const PolarGrid& polar,
                                             const SensorPose& sensor,
                                             const GridSpec2D& target);

// Mask of the cells whose center lies inside the sensor's 2D field of view.
std::vector<std::uint8_t> fov_mask(const GridSpec2D& spec,
                                   const SensorPose& sensor);

}  // namespace sensorvis

#endif  // SENSORVIS_GRID_HPP_
