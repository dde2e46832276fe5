#ifndef SENSORVIS_VISIBILITY_HPP_
#define SENSORVIS_VISIBILITY_HPP_

#include <vector>

#include "sensorvis/geometry.hpp"
#include "sensorvis/grid.hpp"
#include "sensorvis/object.hpp"

namespace sensorvis {

// Values at or above `occupied_above` block the line of sight.
struct OccupancyThreshold {
  double occupied_above = 0.7;

  void validate() const;
  bool blocks(float v) const { return v >= occupied_above; }
};

// Line of sight on the ground plane. A cell inside the field of view is
// visible iff no cell crossed before it on the segment from the sensor to the
// cell center is occupied. Occupied cells are visible themselves; the cell
// holding the sensor never blocks.
VisibilityGrid2D raytrace_2d(const Grid2D& occ, const SensorPose& sensor,
                             const FovSpec& fov, OccupancyThreshold thr);

// Per-ray scan in increasing range. Binary mode: 1 up to and including the
// first blocking bin, 0 after. Graded mode: each bin sees the transmission
// accumulated in front of it, where a bin transmits 1 - max(0, 2 * occ - 1).
SphericalGrid raytrace_spherical(const SphericalGrid& occ,
                                 OccupancyThreshold thr, bool graded = false);

// Range index of the first blocking bin of every spherical ray (n_range when
// the ray is clear), indexed like SphericalGridSpec::ray_offset / n_range.
// Binary raytracing followed by slicing only needs this.
struct FirstHitMap {
  SphericalGridSpec spec;
  std::vector<int> first;

  int at(int ia, int ie) const {
    return first[static_cast<std::size_t>(ia) * spec.n_elevation + ie];
  }
  bool operator==(const FirstHitMap&) const = default;
};

FirstHitMap first_hits(const SphericalGrid& occ, OccupancyThreshold thr);

// Same result as slice_at_height(raytrace_spherical(occ, thr), ...) in binary
// mode, computed from the first-hit map.
PolarGrid slice_first_hits(const FirstHitMap& hits, const SensorPose& sensor, double h,
                           float unknown = kUnknown);

// Line of sight from the 3D sensor position to every voxel center, with the
// same blocking rule as raytrace_2d. The sensor may sit above the volume.
VoxelGrid raytrace_voxels(const VoxelGrid& occ, const SensorPose& sensor,
                          OccupancyThreshold thr);

// Mean visibility over the voxel layers whose center height lies in
// [z_lo, z_hi]. The mask of the result is all-true.
VisibilityGrid2D squash_z_average(const VoxelGrid& vis3d, double z_lo = 0.0,
                                  double z_hi = 4.0);

// V_O: true iff any cell overlapping the object footprint is inside the mask
// and has visibility of at least `vis_threshold`.
bool object_visibility(const VisibilityGrid2D& vis, const ObjectState& obj,
                       double vis_threshold = 0.5);

}  // namespace sensorvis

#endif  // SENSORVIS_VISIBILITY_HPP_
