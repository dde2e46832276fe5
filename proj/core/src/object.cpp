#include "sensorvis/object.hpp"

#include <cmath>

#include "sensorvis/error.hpp"

namespace sensorvis {

void ObjectState::validate() const {
  const bool finite = std::isfinite(t) && std::isfinite(x) && std::isfinite(y) &&
                      std::isfinite(yaw) && std::isfinite(vx) && std::isfinite(vy) &&
                      std::isfinite(yaw_rate);
  if (!finite) {
    throw Error("evaluation-metrics", ErrorKind::kInvalidArgument,
                "object state has non-finite fields");
  }
  if (!(extent.length > 0.0 && extent.width > 0.0 && extent.height > 0.0)) {
    throw Error("evaluation-metrics", ErrorKind::kInvalidArgument,
                "object extent must be positive");
  }
}

}  // namespace sensorvis
