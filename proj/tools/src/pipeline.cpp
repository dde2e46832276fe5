#include "sensorvis_harness/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "sensorvis/error.hpp"
#include "sensorvis/simulator.hpp"

namespace sensorvis::harness {
namespace {

using nlohmann::json;

std::string percent(const std::optional<Ratio>& r) {
  if (!r) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * r->value());
  return buf;
}

}  // namespace

EstimatorConfig estimator_config(const RunConfig& cfg, EstimatorKind kind) {
  EstimatorConfig e = cfg.estimators;
  if (kind == EstimatorKind::kCamera3D) {
    e.sensor = cfg.scene.camera;
    e.homography = cfg.scene.camera_model.ground_homography(cfg.scene.camera);
    e.image_width = cfg.scene.camera_model.image_width;
    e.image_height = cfg.scene.camera_model.image_height;
  } else {
    e.sensor = cfg.scene.radar;
  }
  return e;
}

DetectionSource detection_source(const RunConfig& cfg, EstimatorKind kind) {
  DetectionSource src;
  src.tolerance.position_radius = cfg.evaluation.position_radius;
  src.tolerance.doppler_tolerance = cfg.evaluation.doppler_tolerance;
  if (kind == EstimatorKind::kCamera3D) {
    src.sensor = cfg.scene.camera;
    src.tolerance.mode = AssociationMode::kCamera;
    src.homography = Homography(cfg.scene.camera_model.ground_homography(cfg.scene.camera));
  } else {
    src.sensor = cfg.scene.radar;
    src.tolerance.mode = AssociationMode::kRadar;
  }
  return src;
}

std::vector<Frame> frames_from_logs(const MeasurementLog& log, const LabelFile& labels,
                                    const SizePrior& defaults) {
  std::map<double, Frame> by_time;
  for (const SensorFrame& sf : log.frames) {
    Frame& f = by_time[sf.t];
    f.t = sf.t;
    if (sf.sensor == "radar") {
      f.radar.insert(f.radar.end(), sf.measurements.begin(), sf.measurements.end());
    } else if (sf.sensor == "camera") {
      f.boxes.insert(f.boxes.end(), sf.boxes.begin(), sf.boxes.end());
    } else {
      throw Error("cli-harness", ErrorKind::kData,
                  "unknown sensor id '" + sf.sensor + "' in measurement log");
    }
  }
  std::vector<Frame> frames;
  std::vector<double> times;
  for (auto& [t, f] : by_time) {
    times.push_back(t);
    frames.push_back(std::move(f));
  }
  const auto objects = labels_to_objects(labels, times, defaults);
  for (std::size_t k = 0; k < frames.size(); ++k) frames[k].objects = objects[k];
  return frames;
}

std::vector<Frame> load_frames(const RunConfig& cfg) {
  if (cfg.input) {
    return frames_from_logs(load_measurement_log(cfg.input->measurements),
                            load_labels(cfg.input->labels), cfg.estimators.size_prior);
  }
  return generate_scene(cfg.scene).frames;
}

std::vector<VisibilityGrid2D> run_estimator(const RunConfig& cfg, EstimatorKind kind,
                                            std::span<const Frame> frames) {
  auto estimator = make_estimator(kind, estimator_config(cfg, kind));
  return sensorvis::run_estimator(*estimator, frames);
}

ReportFile evaluate(const RunConfig& cfg, EstimatorKind kind, std::span<const Frame> frames,
                    std::span<const VisibilityGrid2D> grids) {
  ReportFile rf;
  rf.estimator = std::string(to_string(kind));
  RunConfig echo = cfg;
  echo.estimator = kind;
  rf.config = to_json(echo);
  rf.report = evaluate_run(grids, frames, detection_source(cfg, kind),
                           cfg.evaluation.vis_threshold);
  return rf;
}

ReportFile evaluate(const RunConfig& cfg, EstimatorKind kind, std::span<const Frame> frames) {
  const auto grids = run_estimator(cfg, kind, frames);
  return evaluate(cfg, kind, frames, grids);
}

std::string comparison_table(std::span<const ReportFile> reports) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %7s %7s %7s %7s %9s %8s %8s %8s %8s\n", "estimator",
                "TVR", "FVR", "FIR", "TIR", "coverage", "TV", "FV", "TI", "FI");
  out += line;
  for (const ReportFile& r : reports) {
    const MetricsReport& m = r.report;
    std::snprintf(line, sizeof line, "%-10s %7s %7s %7s %7s %9s %8llu %8llu %8llu %8llu\n",
                  r.estimator.c_str(), percent(m.rates.tvr).c_str(),
                  percent(m.rates.fvr).c_str(), percent(m.rates.fir).c_str(),
                  percent(m.rates.tir).c_str(), percent(m.coverage).c_str(),
                  static_cast<unsigned long long>(m.counts.tv),
                  static_cast<unsigned long long>(m.counts.fv),
                  static_cast<unsigned long long>(m.counts.ti),
                  static_cast<unsigned long long>(m.counts.fi));
    out += line;
  }
  return out;
}

nlohmann::json comparison_json(std::span<const ReportFile> reports) {
  json rows = json::array();
  for (const ReportFile& r : reports) {
    const json full = report_to_json(r);
    rows.push_back({{"estimator", r.estimator},
                    {"counts", full["counts"]},
                    {"rates", full["rates"]},
                    {"coverage_rate", full["coverage_rate"]}});
  }
  json doc = {{"rows", rows}};
  if (!reports.empty()) doc["config"] = reports.front().config;
  return doc;
}

void write_simulation(const RunConfig& cfg, std::span<const Frame> frames,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_measurement_log(measurement_log_from_frames(frames), dir / "measurements.jsonl");
  save_labels(labels_from_frames(frames), dir / "labels.jsonl");
  std::ofstream echo(dir / "config.json");
  echo << to_json(cfg).dump(2) << '\n';
}

}  // namespace sensorvis::harness
