#ifndef SENSORVIS_HARNESS_SWEEP_HPP_
#define SENSORVIS_HARNESS_SWEEP_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensorvis/metrics.hpp"
#include "sensorvis_harness/config.hpp"

namespace sensorvis::harness {

struct SweepParameter {
  std::string path;  // dotted path into the run configuration
  std::vector<nlohmann::json> values;
};

enum class Objective { kFvr, kFir, kWeightedSum };

struct SweepSpec {
  std::vector<SweepParameter> parameters;
  Objective objective = Objective::kWeightedSum;
  double fvr_weight = 1.0;
  double fir_weight = 1.0;
  int budget = 16;
  std::uint64_t seed = 1;
  // 0 uses the hardware concurrency.
  int threads = 0;

  void validate() const;
  std::size_t combinations() const;
};

// Parameters list either explicit "values" or a "range" [lo, hi] with "steps".
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

// Undefined rates make the objective +infinity.
double objective_value(const SweepSpec& spec, const Rates& rates);

struct SweepTrial {
  nlohmann::json assignment;  // path -> value
  double objective = std::numeric_limits<double>::infinity();
  Rates rates;
};

struct SweepResult {
  std::vector<SweepTrial> trials;
  std::size_t best = 0;
  nlohmann::json best_config;

  nlohmann::json to_json() const;
};

// Evaluates every combination when there are at most `budget` of them,
// otherwise `budget` distinct combinations drawn with the spec's seed. Ties go
// to the earliest trial.
SweepResult run_sweep(const RunConfig& base, const SweepSpec& spec);

}  // namespace sensorvis::harness

#endif  // SENSORVIS_HARNESS_SWEEP_HPP_
