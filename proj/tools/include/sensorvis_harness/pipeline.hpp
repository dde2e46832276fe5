#ifndef SENSORVIS_HARNESS_PIPELINE_HPP_
#define SENSORVIS_HARNESS_PIPELINE_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensorvis/estimators.hpp"
#include "sensorvis/frame.hpp"
#include "sensorvis/io.hpp"
#include "sensorvis_harness/config.hpp"

namespace sensorvis::harness {

// Estimator settings with the sensor pose (and homography for the camera)
// taken from the scene.
EstimatorConfig estimator_config(const RunConfig& cfg, EstimatorKind kind);

// Ground truth for an estimator: camera association for camera3d, radar
// association otherwise.
DetectionSource detection_source(const RunConfig& cfg, EstimatorKind kind);

// Frames from the input logs if configured, otherwise from the simulator.
std::vector<Frame> load_frames(const RunConfig& cfg);

// Rebuilds frames from a measurement log and polyline labels.
std::vector<Frame> frames_from_logs(const MeasurementLog& log, const LabelFile& labels,
                                    const SizePrior& defaults);

std::vector<VisibilityGrid2D> run_estimator(const RunConfig& cfg, EstimatorKind kind,
                                            std::span<const Frame> frames);

// Runs the estimator and evaluates it. The report echoes the configuration
// with `estimator` set to `kind`.
ReportFile evaluate(const RunConfig& cfg, EstimatorKind kind, std::span<const Frame> frames);
ReportFile evaluate(const RunConfig& cfg, EstimatorKind kind, std::span<const Frame> frames,
                    std::span<const VisibilityGrid2D> grids);

// Table with one row per estimator: TVR, FVR, FIR, TIR, coverage and counts.
std::string comparison_table(std::span<const ReportFile> reports);
nlohmann::json comparison_json(std::span<const ReportFile> reports);

// Writes the simulated logs and the config echo into `dir`.
void write_simulation(const RunConfig& cfg, std::span<const Frame> frames,
                      const std::filesystem::path& dir);

}  // namespace sensorvis::harness

#endif  // SENSORVIS_HARNESS_PIPELINE_HPP_
