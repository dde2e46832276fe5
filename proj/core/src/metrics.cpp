#include "sensorvis/metrics.hpp"

#include <cmath>
#include <string>

#include "sensorvis/error.hpp"
#include "sensorvis/visibility.hpp"

namespace sensorvis {
namespace {

constexpr char kModule[] = "evaluation-metrics";
constexpr double kTimeEpsilon = 1e-6;

std::optional<Ratio> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return Ratio{num, den};
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kTrueVisible:
      return "TV";
    case Outcome::kFalseVisible:
      return "FV";
    case Outcome::kTrueInvisible:
      return "TI";
    case Outcome::kFalseInvisible:
      return "FI";
  }
  return "??";
}

Outcome parse_outcome(std::string_view s) {
  for (Outcome o : {Outcome::kTrueVisible, Outcome::kFalseVisible,
                    Outcome::kTrueInvisible, Outcome::kFalseInvisible}) {
    if (to_string(o) == s) return o;
  }
  throw Error(kModule, ErrorKind::kData, "unknown outcome '" + std::string(s) + "'");
}

Outcome classify(bool visible, bool detected) {
  if (visible) return detected ? Outcome::kTrueVisible : Outcome::kFalseVisible;
  return detected ? Outcome::kFalseInvisible : Outcome::kTrueInvisible;
}

void ConfusionCounts::add(Outcome o) {
  switch (o) {
    case Outcome::kTrueVisible:
      ++tv;
      break;
    case Outcome::kFalseVisible:
      ++fv;
      break;
    case Outcome::kTrueInvisible:
      ++ti;
      break;
    case Outcome::kFalseInvisible:
      ++fi;
      break;
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tv += o.tv;
  fv += o.fv;
  ti += o.ti;
  fi += o.fi;
  return *this;
}

Rates rates(const ConfusionCounts& c) {
  Rates r;
  r.tvr = ratio(c.tv, c.tv + c.fi);
  r.fir = ratio(c.fi, c.tv + c.fi);
  r.fvr = ratio(c.fv, c.fv + c.ti);
  r.tir = ratio(c.ti, c.fv + c.ti);
  return r;
}

void AssociationTolerance::validate() const {
  if (!(position_radius > 0.0 && doppler_tolerance > 0.0)) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "association tolerances must be positive");
  }
}

bool detection_status(const ObjectState& obj, std::span<const Measurement> frame,
                      const SensorPose& sensor, const AssociationTolerance& tol) {
  const OrientedRect fp = obj.footprint();
  const Vec3 s = sensor.position();
  const Vec3 v(obj.vx, obj.vy, 0.0);
  for (const Measurement& m : frame) {
    const Vec3 p = world_position(m, sensor);
    if (fp.distance(p.head<2>()) > tol.position_radius) continue;
    const Vec3 d = p - s;
    const double n = d.norm();
    const double radial = n > 0.0 ? v.dot(d) / n : 0.0;
    if (std::abs(m.doppler - radial) <= tol.doppler_tolerance) return true;
  }
  return false;
}

bool detection_status(const ObjectState& obj, std::span<const BoundingBox2D> frame,
                      const Homography& h, const AssociationTolerance& tol) {
  const OrientedRect fp = obj.footprint();
  for (const BoundingBox2D& b : frame) {
    const auto g0 = h.to_ground(b.u_min, b.v_max);
    const auto g1 = h.to_ground(b.u_max, b.v_max);
    if (g0 && g1 && fp.distance(*g0, *g1) <= tol.position_radius) return true;
  }
  return false;
}

void DetectionSource::validate() const {
  sensor.validate();
  tolerance.validate();
  if (tolerance.mode == AssociationMode::kCamera && !homography) {
    throw Error(kModule, ErrorKind::kInvalidArgument,
                "camera association needs a homography");
  }
}

bool detection_status(const ObjectState& obj, const Frame& frame,
                      const DetectionSource& src) {
  if (src.tolerance.mode == AssociationMode::kCamera) {
    return detection_status(obj, frame.boxes, *src.homography, src.tolerance);
  }
  return detection_status(obj, frame.radar, src.sensor, src.tolerance);
}

bool in_evaluation_fov(const ObjectState& obj, const SensorPose& sensor) {
  return footprint_in_fov(sensor, obj.footprint());
}

std::optional<Ratio> coverage_rate(std::span<const Frame> frames,
                                   const DetectionSource& src) {
  src.validate();
  std::uint64_t detected = 0;
  std::uint64_t total = 0;
  for (const Frame& f : frames) {
    for (const ObjectState& obj : f.objects) {
      if (!in_evaluation_fov(obj, src.sensor)) continue;
      ++total;
      if (detection_status(obj, f, src)) ++detected;
    }
  }
  return ratio(detected, total);
}

MetricsReport evaluate_run(std::span<const VisibilityGrid2D> vis,
                           std::span<const Frame> frames, const DetectionSource& src,
                           double vis_threshold) {
  src.validate();
  if (vis.size() != frames.size()) {
    throw Error(kModule, ErrorKind::kData,
                "visibility series has " + std::to_string(vis.size()) +
                    " frames, ground truth has " + std::to_string(frames.size()));
  }
  std::string misaligned;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (std::abs(vis[i].timestamp - frames[i].t) > kTimeEpsilon) {
      if (!misaligned.empty()) misaligned += ", ";
      misaligned += std::to_string(i);
    }
  }
  if (!misaligned.empty()) {
    throw Error(kModule, ErrorKind::kData, "misaligned timestamps at frames " + misaligned);
  }

  MetricsReport report;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    const GridSpec2D& spec = vis[i].spec;
    StepCounts step{f.t, {}};
    for (const ObjectState& obj : f.objects) {
      if (!in_evaluation_fov(obj, src.sensor)) continue;
      if (cells_overlapping(spec, obj.footprint()).empty()) continue;
      const bool v = object_visibility(vis[i], obj, vis_threshold);
      const bool d = detection_status(obj, f, src);
      const Outcome o = classify(v, d);
      step.counts.add(o);
      report.per_object[obj.id].add(o);
      report.events.push_back({f.t, obj.id, obj.label, o});
    }
    report.counts += step.counts;
    report.per_step.push_back(step);
  }
  finalize_report(report);
  return report;
}

void finalize_report(MetricsReport& report) {
  report.rates = rates(report.counts);
  const ConfusionCounts& c = report.counts;
  report.coverage = ratio(c.tv + c.fi, c.total());
}

}  // namespace sensorvis
