#include "sensorvis_harness/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sensorvis/error.hpp"
#include "sensorvis/io.hpp"
#include "sensorvis_harness/config.hpp"
#include "sensorvis_harness/pipeline.hpp"
#include "sensorvis_harness/render.hpp"
#include "sensorvis_harness/sweep.hpp"

namespace sensorvis::harness {
namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string estimator;
  std::vector<std::string> estimators;
  std::string sweep;
  std::string snapshot;
  int frame = 0;
  int scale = 4;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.scene.seed = *o.seed;
  if (!o.estimator.empty()) {
    try {
      cfg.estimator = parse_estimator_kind(o.estimator);
    } catch (const Error& e) {
      throw CLI::ValidationError("--estimator", e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cli-harness", ErrorKind::kData, "cannot write '" + path.string() + "'");
  out << text;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const auto frames = load_frames(cfg);
  write_simulation(cfg, frames, cfg.output_dir);
  out << "wrote " << frames.size() << " frames to " << cfg.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const auto frames = load_frames(cfg);
  const auto grids = run_estimator(cfg, cfg.estimator, frames);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string name(to_string(cfg.estimator));
  save_grid_series(grids, cfg.output_dir / (name + ".grids"));
  write_text(cfg.output_dir / (name + ".config.json"), to_json(cfg).dump(2) + "\n");
  out << "wrote " << grids.size() << " grids to " << (cfg.output_dir / (name + ".grids")).string()
      << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const auto frames = load_frames(cfg);
  const ReportFile report = evaluate(cfg, cfg.estimator, frames);
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = cfg.output_dir / ("report_" + report.estimator + ".json");
  save_report(report, path);
  out << comparison_table(std::span<const ReportFile>(&report, 1));
  out << "report: " << path.string() << '\n';
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  std::vector<EstimatorKind> kinds;
  if (o.estimators.empty()) {
    kinds = {EstimatorKind::kRadar2D, EstimatorKind::kRadar3D, EstimatorKind::kReference};
    if (cfg.scene.camera_enabled) kinds.push_back(EstimatorKind::kCamera3D);
  } else {
    for (const std::string& name : o.estimators) {
      try {
        kinds.push_back(parse_estimator_kind(name));
      } catch (const Error& e) {
        throw CLI::ValidationError("--estimators", e.what());
      }
    }
  }
  const auto frames = load_frames(cfg);
  std::vector<ReportFile> reports;
  for (EstimatorKind k : kinds) reports.push_back(evaluate(cfg, k, frames));
  std::filesystem::create_directories(cfg.output_dir);
  const std::string table = comparison_table(reports);
  write_text(cfg.output_dir / "compare.txt", table);
  write_text(cfg.output_dir / "compare.json", comparison_json(reports).dump(2) + "\n");
  out << table;
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  if (o.sweep.empty()) throw CLI::RequiredError("--sweep");
  const SweepSpec spec = load_sweep_spec(o.sweep);
  const SweepResult result = run_sweep(cfg, spec);
  std::filesystem::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "sweep.json", result.to_json().dump(2) + "\n");
  const SweepTrial& best = result.trials[result.best];
  out << "evaluated " << result.trials.size() << " configurations; ";
  if (std::isfinite(best.objective)) {
    out << "best " << best.assignment.dump() << " objective " << best.objective << '\n';
  } else {
    out << "no configuration has a defined objective (a rate has a zero denominator)\n";
  }
  return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out) {
  if (o.snapshot.empty()) throw CLI::RequiredError("--snapshot");
  const auto grids = load_grid_series(o.snapshot);
  if (o.frame < 0 || static_cast<std::size_t>(o.frame) >= grids.size()) {
    throw CLI::ValidationError("--frame", "frame index out of range (" +
                                              std::to_string(grids.size()) + " grids)");
  }
  const VisibilityGrid2D& vis = grids[o.frame];
  std::vector<ObjectState> objects;
  std::vector<Measurement> measurements;
  SensorPose sensor;
  std::filesystem::path dir = o.out.empty() ? std::filesystem::path("out") : std::filesystem::path(o.out);
  if (!o.config.empty()) {
    const RunConfig cfg = resolve(o);
    dir = cfg.output_dir;
    sensor = estimator_config(cfg, cfg.estimator).sensor;
    for (const Frame& f : load_frames(cfg)) {
      if (std::abs(f.t - vis.timestamp) < 1e-6) {
        objects = f.objects;
        measurements = f.radar;
        break;
      }
    }
  }
  std::filesystem::create_directories(dir);
  const auto path = dir / ("frame_" + std::to_string(o.frame) + ".ppm");
  write_ppm(render_visibility(vis, objects, measurements, sensor, o.scale), path);
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensor visibility estimation and evaluation"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration (JSON)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", seed, "scene seed");
    sub->add_option("--estimator", o.estimator, "radar2d | radar3d | camera3d | reference");
  };
  auto* simulate = app.add_subcommand("simulate", "generate a scene and write its logs");
  auto* estimate = app.add_subcommand("estimate", "run an estimator and write visibility grids");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "run and evaluate an estimator");
  auto* compare = app.add_subcommand("compare", "evaluate several estimators side by side");
  auto* sweep = app.add_subcommand("sweep", "search estimator parameters");
  auto* render = app.add_subcommand("render", "render a visibility grid as a PPM image");
  for (auto* sub : {simulate, estimate, evaluate_cmd, compare, sweep, render}) add_common(sub);
  compare->add_option("--estimators", o.estimators, "estimators to compare")->delimiter(',');
  sweep->add_option("--sweep", o.sweep, "sweep file (JSON)")->required();
  render->add_option("--snapshot", o.snapshot, "grid series written by estimate")->required();
  render->add_option("--frame", o.frame, "frame index");
  render->add_option("--scale", o.scale, "pixels per cell")->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (auto* sub : {simulate, estimate, evaluate_cmd, compare, sweep, render}) {
    if (sub->parsed() && sub->count("--seed") > 0) o.seed = seed;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (estimate->parsed()) return cmd_estimate(o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (render->parsed()) return cmd_render(o, out);
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInternal ? kExitInternal : kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace sensorvis::harness
