#ifndef SENSORVIS_FRAME_HPP_
#define SENSORVIS_FRAME_HPP_

#include <vector>

#include "sensorvis/object.hpp"
#include "sensorvis/sensor_models.hpp"

namespace sensorvis {

// Everything known at one time step: ground-truth objects, radar returns
// and camera detections.
struct Frame {
  double t = 0.0;
  std::vector<ObjectState> objects;
  std::vector<Measurement> radar;
  std::vector<BoundingBox2D> boxes;

  bool operator==(const Frame&) const = default;
};

}  // namespace sensorvis

#endif  // SENSORVIS_FRAME_HPP_
