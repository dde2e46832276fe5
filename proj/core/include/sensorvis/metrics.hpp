#ifndef SENSORVIS_METRICS_HPP_
#define SENSORVIS_METRICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sensorvis/frame.hpp"
#include "sensorvis/grid.hpp"
#include "sensorvis/object.hpp"
#include "sensorvis/sensor_models.hpp"

namespace sensorvis {

enum class Outcome { kTrueVisible, kFalseVisible, kTrueInvisible, kFalseInvisible };

// "TV", "FV", "TI", "FI".
std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

Outcome classify(bool visible, bool detected);

struct ConfusionCounts {
  std::uint64_t tv = 0;
  std::uint64_t fv = 0;
  std::uint64_t ti = 0;
  std::uint64_t fi = 0;

  void add(Outcome o);
  std::uint64_t total() const { return tv + fv + ti + fi; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// Exact ratio of two counts. The denominator is never zero.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Ratio&) const = default;
};

// A rate with a zero denominator is absent, never 0.
struct Rates {
  std::optional<Ratio> tvr;
  std::optional<Ratio> fvr;
  std::optional<Ratio> fir;
  std::optional<Ratio> tir;

  bool operator==(const Rates&) const = default;
};

// TVR = TV/(TV+FI), FIR = FI/(TV+FI), FVR = FV/(FV+TI), TIR = TI/(FV+TI).
Rates rates(const ConfusionCounts& c);

enum class AssociationMode { kRadar, kCamera };

struct AssociationTolerance {
  double position_radius = 0.5;    // meters
  double doppler_tolerance = 0.5;  // m/s
  AssociationMode mode = AssociationMode::kRadar;

  void validate() const;
};

// D_O for radar: some measurement lies within position_radius of the object
// footprint (ground plane) and its Doppler matches the object's radial
// velocity, taken along the line from the sensor to the measurement.
bool detection_status(const ObjectState& obj, std::span<const Measurement> frame,
                      const SensorPose& sensor, const AssociationTolerance& tol);

// D_O for camera: the ground projection of some detection's bottom edge comes
// within position_radius of the object footprint. The bottom edge of a box
// around a projected upright box runs through its lowest corner, so an exact
// detection always matches its object.
bool detection_status(const ObjectState& obj, std::span<const BoundingBox2D> frame,
                      const Homography& h, const AssociationTolerance& tol);

// Where ground-truth detections come from: the sensor pose, the association
// rule and, in camera mode, the image-to-ground homography.
struct DetectionSource {
  SensorPose sensor;
  AssociationTolerance tolerance;
  std::optional<Homography> homography;

  void validate() const;
};

bool detection_status(const ObjectState& obj, const Frame& frame,
                      const DetectionSource& src);

// Pairs outside the static field of view are excluded from every count.
bool in_evaluation_fov(const ObjectState& obj, const SensorPose& sensor);

// Mean D_O over all in-FoV (object, step) pairs; absent when there are none.
std::optional<Ratio> coverage_rate(std::span<const Frame> frames,
                                   const DetectionSource& src);

struct EventRecord {
  double t = 0.0;
  int object_id = 0;
  std::string label;
  Outcome outcome = Outcome::kTrueVisible;

  bool operator==(const EventRecord&) const = default;
};

struct StepCounts {
  double t = 0.0;
  ConfusionCounts counts;

  bool operator==(const StepCounts&) const = default;
};

struct MetricsReport {
  ConfusionCounts counts;
  Rates rates;
  std::optional<Ratio> coverage;
  std::map<int, ConfusionCounts> per_object;
  std::vector<StepCounts> per_step;
  std::vector<EventRecord> events;

  bool operator==(const MetricsReport&) const = default;
};

// Classifies every in-FoV (object, step) pair whose footprint touches the
// visibility grid. vis[i] must carry frames[i].t; mismatches throw an error
// listing the offending frame indices.
MetricsReport evaluate_run(std::span<const VisibilityGrid2D> vis,
                           std::span<const Frame> frames, const DetectionSource& src,
                           double vis_threshold = 0.5);

// Rebuilds rates and coverage from the counts and events of a report.
void finalize_report(MetricsReport& report);

}  // namespace sensorvis

#endif  // SENSORVIS_METRICS_HPP_
