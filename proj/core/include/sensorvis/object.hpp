#ifndef SENSORVIS_OBJECT_HPP_
#define SENSORVIS_OBJECT_HPP_

#include <string>

#include "sensorvis/geometry.hpp"

namespace sensorvis {

// Ground-truth dynamic object at one instant.
struct ObjectState {
  int id = 0;
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double yaw_rate = 0.0;
  Extent extent;
  std::string label = "car";

  OrientedRect footprint() const {
    return {Vec2(x, y), yaw, extent.length, extent.width};
  }
  OrientedBox box() const { return {footprint(), 0.0, extent.height}; }
  Vec2 velocity() const { return {vx, vy}; }

  void validate() const;
  bool operator==(const ObjectState&) const = default;
};

}  // namespace sensorvis

#endif  // SENSORVIS_OBJECT_HPP_
