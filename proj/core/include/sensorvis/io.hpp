#ifndef SENSORVIS_IO_HPP_
#define SENSORVIS_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensorvis/frame.hpp"
#include "sensorvis/grid.hpp"
#include "sensorvis/metrics.hpp"
#include "sensorvis/object.hpp"
#include "sensorvis/sensor_models.hpp"

namespace sensorvis {

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------- measurements

// One line of a measurement log.
struct SensorFrame {
  double t = 0.0;
  std::string sensor;
  std::vector<Measurement> measurements;
  std::vector<BoundingBox2D> boxes;

  bool operator==(const SensorFrame&) const = default;
};

struct MeasurementLog {
  std::vector<SensorFrame> frames;

  bool operator==(const MeasurementLog&) const = default;
};

void save_measurement_log(const MeasurementLog& log, std::ostream& out);
MeasurementLog load_measurement_log(std::istream& in);
void save_measurement_log(const MeasurementLog& log, const std::filesystem::path& path);
MeasurementLog load_measurement_log(const std::filesystem::path& path);

// One "radar" record per frame, plus one "camera" record per frame when any
// frame carries boxes.
MeasurementLog measurement_log_from_frames(std::span<const Frame> frames);

// ---------------------------------------------------------------------- labels

struct LabelKnot {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const LabelKnot&) const = default;
};

// Trajectory polyline of one object; position is piecewise linear in t.
struct LabelTrack {
  int id = 0;
  std::optional<std::string> label;
  std::optional<Extent> extent;
  std::vector<LabelKnot> knots;

  void validate() const;
  bool operator==(const LabelTrack&) const = default;
};

struct LabelFile {
  std::vector<LabelTrack> tracks;

  bool operator==(const LabelFile&) const = default;
};

void save_labels(const LabelFile& labels, std::ostream& out);
LabelFile load_labels(std::istream& in);
void save_labels(const LabelFile& labels, const std::filesystem::path& path);
LabelFile load_labels(const std::filesystem::path& path);

// Human-readable notes on legal but suspicious tracks (stationary objects).
std::vector<std::string> label_warnings(const LabelFile& labels);

// Object states at each frame time. A track contributes only at times inside
// its knot span. Extent comes from the track, then from `defaults` by class,
// then `fallback`.
std::vector<std::vector<ObjectState>> labels_to_objects(const LabelFile& labels,
                                                        std::span<const double> frame_times,
                                                        const SizePrior& defaults,
                                                        const Extent& fallback = {});

// Polyline labels of every object in the frames, with a knot every
// `knot_interval` seconds plus the first and last sighting.
LabelFile labels_from_frames(std::span<const Frame> frames, double knot_interval = 1.0);

// ------------------------------------------------------------------------ grids

struct GridSnapshot {
  std::variant<Grid2D, VisibilityGrid2D, PolarGrid, SphericalGrid, VoxelGrid> grid;
  double timestamp = 0.0;

  bool operator==(const GridSnapshot&) const = default;
};

// Values are stored as round(v * 65535) in 16 bits; they must lie in [0, 1].
void save_grid(const GridSnapshot& snapshot, std::ostream& out);
GridSnapshot load_grid(std::istream& in);
void save_grid(const GridSnapshot& snapshot, const std::filesystem::path& path);
GridSnapshot load_grid(const std::filesystem::path& path);

// Several snapshots back to back in one stream.
void save_grid_series(std::span<const VisibilityGrid2D> grids, const std::filesystem::path& path);
std::vector<VisibilityGrid2D> load_grid_series(const std::filesystem::path& path);

float quantize(float v);

// ---------------------------------------------------------------------- reports

struct ReportFile {
  std::string estimator;
  nlohmann::json config = nlohmann::json::object();
  MetricsReport report;

  bool operator==(const ReportFile&) const = default;
};

nlohmann::json report_to_json(const ReportFile& report);
ReportFile report_from_json(const nlohmann::json& doc);
void save_report(const ReportFile& report, std::ostream& out);
ReportFile load_report(std::istream& in);
void save_report(const ReportFile& report, const std::filesystem::path& path);
ReportFile load_report(const std::filesystem::path& path);

}  // namespace sensorvis

#endif  // SENSORVIS_IO_HPP_
