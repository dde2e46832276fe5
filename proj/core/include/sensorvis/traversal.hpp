#ifndef SENSORVIS_TRAVERSAL_HPP_
#define SENSORVIS_TRAVERSAL_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

#include "sensorvis/grid.hpp"

namespace sensorvis {

// Exact cell traversal (Amanatides & Woo) of the segment from `a` to `b`,
// clipped to the grid. Calls visit(cell, t_in, t_out) for every cell the
// segment crosses over a positive length, in order; t is the segment
// parameter in [0, 1]. When the segment passes exactly through a cell corner
// the two cells touching it only at that corner are skipped. The visitor
// returns false to stop early.
template <class Visitor>
void traverse_cells(const GridSpec2D& spec, const Vec2& a, const Vec2& b,
                    Visitor&& visit) {
  const Vec2 d = b - a;
  double t_lo = 0.0;
  double t_hi = 1.0;
  const double lo[2] = {spec.origin_x, spec.origin_y};
  const double hi[2] = {spec.max_x(), spec.max_y()};
  for (int k = 0; k < 2; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (a[k] < lo[k] || a[k] >= hi[k]) return;
      continue;
    }
    double t0 = (lo[k] - a[k]) / d[k];
    double t1 = (hi[k] - a[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::max(t_lo, t0);
    t_hi = std::min(t_hi, t1);
  }
  if (t_lo > t_hi || (t_lo == t_hi && t_lo > 0.0)) return;

  const double res = spec.resolution;
  // Locate the start cell from a point just inside the clipped segment.
  const double t_probe = t_lo + std::min(1e-9, (t_hi - t_lo) * 0.5);
  const Vec2 start = a + t_probe * d;
  int cell[2] = {
      std::clamp(static_cast<int>(std::floor((start.x() - lo[0]) / res)), 0,
                 spec.width - 1),
      std::clamp(static_cast<int>(std::floor((start.y() - lo[1]) / res)), 0,
                 spec.height - 1)};
  if (t_lo == t_hi) {
    visit(CellIndex{cell[0], cell[1]}, t_lo, t_hi);
    return;
  }

  int step[2];
  double t_max[2];
  double t_delta[2];
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (d[k] > 0.0) {
      step[k] = 1;
      t_max[k] = (lo[k] + (cell[k] + 1) * res - a[k]) / d[k];
      t_delta[k] = res / d[k];
    } else if (d[k] < 0.0) {
      step[k] = -1;
      t_max[k] = (lo[k] + cell[k] * res - a[k]) / d[k];
      t_delta[k] = -res / d[k];
    } else {
      step[k] = 0;
      t_max[k] = kInf;
      t_delta[k] = kInf;
    }
  }

  const int limit[2] = {spec.width, spec.height};
  const double tie_eps = 1e-9 * std::max(t_delta[0] < kInf ? t_delta[0] : 0.0,
                                         t_delta[1] < kInf ? t_delta[1] : 0.0);
  double t_in = t_lo;
  for (;;) {
    const double t_next = std::min(t_max[0], t_max[1]);
    const double t_out = std::min(t_next, t_hi);
    if (!visit(CellIndex{cell[0], cell[1]}, t_in, t_out)) return;
    if (t_next >= t_hi) return;
    if (std::abs(t_max[0] - t_max[1]) <= tie_eps) {
      cell[0] += step[0];
      cell[1] += step[1];
      t_max[0] += t_delta[0];
      t_max[1] += t_delta[1];
    } else {
      const int k = t_max[0] < t_max[1] ? 0 : 1;
      cell[k] += step[k];
      t_max[k] += t_delta[k];
    }
    if (cell[0] < 0 || cell[1] < 0 || cell[0] >= limit[0] ||
        cell[1] >= limit[1]) {
      return;
    }
    t_in = t_next;
  }
}

}  // namespace sensorvis

#endif  // SENSORVIS_TRAVERSAL_HPP_
