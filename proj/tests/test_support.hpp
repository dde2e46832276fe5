#ifndef SENSORVIS_TEST_SUPPORT_HPP_
#define SENSORVIS_TEST_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "sensorvis/grid.hpp"
#include "sensorvis/object.hpp"
#include "sensorvis/visibility.hpp"

namespace sensorvis::testing {

inline ObjectState make_object(int id, double x, double y, Extent e = {},
                               double yaw = 0.0, const char* label = "car") {
  ObjectState o;
  o.id = id;
  o.x = x;
  o.y = y;
  o.yaw = yaw;
  o.extent = e;
  o.label = label;
  return o;
}

inline SensorPose sensor_at(double x, double y, double z, double max_range = 100.0,
                            double half_angle = kPi) {
  SensorPose s;
  s.x = x;
  s.y = y;
  s.z = z;
  s.fov.max_range = max_range;
  s.fov.azimuth_half_angle = half_angle;
  return s;
}

// Cells of the grid containing any of n x n interior sample points of the
// rectangle, excluding samples that lie on a cell edge.
inline std::set<CellIndex> sampled_cells(const GridSpec2D& spec, const OrientedRect& r,
                                         int n = 100) {
  std::set<CellIndex> out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double fa = (a + 0.5) / n - 0.5;
      const double fb = (b + 0.5) / n - 0.5;
      const Vec2 p = r.center + fa * r.length * r.axis_u() + fb * r.width * r.axis_v();
      const auto c = world_to_cell(spec, p);
      if (c) out.insert(*c);
    }
  }
  return out;
}

// Dense ray-sampling line of sight on a 2D grid: march from the sensor to the
// cell center in steps of res/step_div and report whether any occupied cell
// other than the target and the sensor cell is entered first.
inline bool dense_los(const Grid2D& occ, const Vec2& sensor, CellIndex target,
                      OccupancyThreshold thr, int step_div = 400) {
  const GridSpec2D& s = occ.spec;
  const Vec2 goal = cell_center(s, target);
  const double len = (goal - sensor).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / s.resolution * step_div)));
  const auto own = world_to_cell(s, sensor);
  for (int k = 0; k <= steps; ++k) {
    const Vec2 p = sensor + (goal - sensor) * (static_cast<double>(k) / steps);
    const auto c = world_to_cell(s, p);
    if (!c || *c == target) continue;
    if (own && *c == *own) continue;
    if (thr.blocks(occ[s.flat(*c)])) return false;
  }
  return true;
}

inline Grid2D random_occupancy(const GridSpec2D& spec, std::mt19937_64& rng,
                               double density) {
  Grid2D g(spec, 0.0f);
  std::bernoulli_distribution occ(density);
  for (float& v : g.values) v = occ(rng) ? 1.0f : 0.0f;
  return g;
}

}  // namespace sensorvis::testing

#endif  // SENSORVIS_TEST_SUPPORT_HPP_
