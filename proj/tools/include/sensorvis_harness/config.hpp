#ifndef SENSORVIS_HARNESS_CONFIG_HPP_
#define SENSORVIS_HARNESS_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensorvis/estimators.hpp"
#include "sensorvis/metrics.hpp"
#include "sensorvis/simulator.hpp"

namespace sensorvis::harness {

// Recorded logs to evaluate instead of a simulated scene.
struct InputPaths {
  std::filesystem::path measurements;
  std::filesystem::path labels;
};

struct EvaluationConfig {
  double position_radius = 0.5;
  double doppler_tolerance = 0.5;
  double vis_threshold = 0.5;
};

// Library defaults, except that camera boxes are oriented along the simulated
// road (world x).
inline EstimatorConfig default_estimator_config() {
  EstimatorConfig e;
  e.camera_heading_prior = 0.0;
  return e;
}

struct RunConfig {
  SceneConfig scene;
  std::optional<InputPaths> input;
  EstimatorKind estimator = EstimatorKind::kRadar3D;
  // Estimator settings; the sensor pose, homography and image size are filled
  // from the scene for each estimator.
  EstimatorConfig estimators = default_estimator_config();
  EvaluationConfig evaluation;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

// Complete JSON form of a configuration (every field, defaults included).
nlohmann::json to_json(const RunConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Sets the value at a dotted path ("estimators.decay.decay_rate") in a JSON
// document. Every object on the path must already exist.
void set_path(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

}  // namespace sensorvis::harness

#endif  // SENSORVIS_HARNESS_CONFIG_HPP_
