#include "sensorvis_harness/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <thread>

#include "sensorvis/error.hpp"
#include "sensorvis_harness/pipeline.hpp"

namespace sensorvis::harness {
namespace {

using nlohmann::json;

[[noreturn]] void sweep_error(const std::string& msg) {
  throw Error("cli-harness", ErrorKind::kData, "sweep: " + msg);
}

bool touches_scene(const SweepSpec& spec) {
  return std::any_of(spec.parameters.begin(), spec.parameters.end(), [](const SweepParameter& p) {
    return p.path.rfind("scene.", 0) == 0 || p.path.rfind("input", 0) == 0;
  });
}

json rate_json(const std::optional<Ratio>& r) {
  return r ? json(r->value()) : json(nullptr);
}

}  // namespace

void SweepSpec::validate() const {
  if (parameters.empty()) sweep_error("no parameters");
  for (const SweepParameter& p : parameters) {
    if (p.path.empty()) sweep_error("parameter path is empty");
    if (p.values.empty()) sweep_error("parameter '" + p.path + "' has no values");
  }
  if (budget < 1) sweep_error("budget must be >= 1");
  if (fvr_weight < 0.0 || fir_weight < 0.0) sweep_error("weights must be >= 0");
  if (threads < 0) sweep_error("threads must be >= 0");
}

std::size_t SweepSpec::combinations() const {
  std::size_t n = 1;
  for (const SweepParameter& p : parameters) {
    if (n > std::numeric_limits<std::size_t>::max() / p.values.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    n *= p.values.size();
  }
  return n;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& doc) {
  SweepSpec spec;
  try {
    for (const json& p : doc.at("parameters")) {
      SweepParameter param;
      param.path = p.at("path").get<std::string>();
      if (p.contains("values")) {
        for (const json& v : p["values"]) param.values.push_back(v);
      } else {
        const auto range = p.at("range").get<std::vector<double>>();
        const int steps = p.at("steps").get<int>();
        if (range.size() != 2 || steps < 1) sweep_error("range needs [lo, hi] and steps >= 1");
        for (int k = 0; k < steps; ++k) {
          const double w = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
          param.values.emplace_back(range[0] + w * (range[1] - range[0]));
        }
      }
      spec.parameters.push_back(std::move(param));
    }
    const std::string objective = doc.value("objective", std::string("sum"));
    if (objective == "fvr") {
      spec.objective = Objective::kFvr;
    } else if (objective == "fir") {
      spec.objective = Objective::kFir;
    } else if (objective == "sum") {
      spec.objective = Objective::kWeightedSum;
    } else {
      sweep_error("objective must be fvr, fir or sum");
    }
    if (doc.contains("weights")) {
      const auto w = doc["weights"].get<std::vector<double>>();
      if (w.size() != 2) sweep_error("weights must be [fvr, fir]");
      spec.fvr_weight = w[0];
      spec.fir_weight = w[1];
    }
    spec.budget = doc.value("budget", spec.budget);
    spec.seed = doc.value("seed", spec.seed);
    spec.threads = doc.value("threads", spec.threads);
  } catch (const json::exception& e) {
    sweep_error(std::string("malformed spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) sweep_error("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    sweep_error(std::string("invalid JSON: ") + e.what());
  }
  return sweep_spec_from_json(doc);
}

double objective_value(const SweepSpec& spec, const Rates& rates) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (spec.objective) {
    case Objective::kFvr:
      return rates.fvr ? rates.fvr->value() : kInf;
    case Objective::kFir:
      return rates.fir ? rates.fir->value() : kInf;
    case Objective::kWeightedSum:
      if (!rates.fvr || !rates.fir) return kInf;
      return spec.fvr_weight * rates.fvr->value() + spec.fir_weight * rates.fir->value();
  }
  return kInf;
}

nlohmann::json SweepResult::to_json() const {
  json trace = json::array();
  for (const SweepTrial& t : trials) {
    trace.push_back({{"assignment", t.assignment},
                     {"objective", std::isfinite(t.objective) ? json(t.objective) : json(nullptr)},
                     {"tvr", rate_json(t.rates.tvr)},
                     {"fvr", rate_json(t.rates.fvr)},
                     {"fir", rate_json(t.rates.fir)},
                     {"tir", rate_json(t.rates.tir)}});
  }
  return {{"best_index", best}, {"best_config", best_config}, {"trace", trace}};
}

SweepResult run_sweep(const RunConfig& base, const SweepSpec& spec) {
  spec.validate();
  base.validate();
  const json base_json = to_json(base);

  // Index tuples of the combinations to try.
  std::vector<std::vector<std::size_t>> picks;
  const std::size_t total = spec.combinations();
  if (total <= static_cast<std::size_t>(spec.budget)) {
    for (std::size_t n = 0; n < total; ++n) {
      std::vector<std::size_t> idx(spec.parameters.size());
      std::size_t rest = n;
      for (std::size_t p = spec.parameters.size(); p-- > 0;) {
        idx[p] = rest % spec.parameters[p].values.size();
        rest /= spec.parameters[p].values.size();
      }
      picks.push_back(std::move(idx));
    }
  } else {
    std::mt19937_64 rng(spec.seed);
    std::set<std::vector<std::size_t>> seen;
    while (picks.size() < static_cast<std::size_t>(spec.budget)) {
      std::vector<std::size_t> idx;
      for (const SweepParameter& p : spec.parameters) {
        idx.push_back(std::uniform_int_distribution<std::size_t>(0, p.values.size() - 1)(rng));
      }
      if (seen.insert(idx).second) picks.push_back(std::move(idx));
    }
  }

  std::vector<json> configs;
  std::vector<json> assignments;
  for (const auto& idx : picks) {
    json doc = base_json;
    json assignment = json::object();
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const SweepParameter& param = spec.parameters[p];
      set_path(doc, param.path, param.values[idx[p]]);
      assignment[param.path] = param.values[idx[p]];
    }
    configs.push_back(std::move(doc));
    assignments.push_back(std::move(assignment));
  }

  const bool regenerate = touches_scene(spec);
  std::vector<Frame> shared;
  if (!regenerate) shared = load_frames(base);

  auto run_one = [&](std::size_t k) {
    const RunConfig cfg = run_config_from_json(configs[k]);
    cfg.validate();
    std::vector<Frame> own;
    if (regenerate) own = load_frames(cfg);
    const std::vector<Frame>& frames = regenerate ? own : shared;
    const ReportFile r = evaluate(cfg, cfg.estimator, frames);
    return SweepTrial{assignments[k], objective_value(spec, r.report.rates), r.report.rates};
  };

  SweepResult result;
  result.trials.resize(configs.size());
  const std::size_t workers = std::max<std::size_t>(
      1, spec.threads > 0 ? static_cast<std::size_t>(spec.threads)
                          : std::max(1u, std::thread::hardware_concurrency()));
  for (std::size_t start = 0; start < configs.size(); start += workers) {
    const std::size_t end = std::min(configs.size(), start + workers);
    if (workers == 1) {
      result.trials[start] = run_one(start);
      continue;
    }
    std::vector<std::future<SweepTrial>> jobs;
    for (std::size_t k = start; k < end; ++k) jobs.push_back(std::async(std::launch::async, run_one, k));
    for (std::size_t k = start; k < end; ++k) result.trials[k] = jobs[k - start].get();
  }

  for (std::size_t k = 1; k < result.trials.size(); ++k) {
    if (result.trials[k].objective < result.trials[result.best].objective) result.best = k;
  }
  result.best_config = configs[result.best];
  return result;
}

}  // namespace sensorvis::harness
