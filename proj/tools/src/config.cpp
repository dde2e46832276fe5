#include "sensorvis_harness/config.hpp"

#include <fstream>
#include <set>

#include "sensorvis/error.hpp"

namespace sensorvis::harness {
namespace {

using nlohmann::json;

constexpr char kModule[] = "cli-harness";

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(kModule, ErrorKind::kData, "config: " + msg);
}

// Reads known keys of one JSON object and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
    if (!j_.is_object()) config_error(ctx_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      config_error(ctx_ + "." + key + " has the wrong type");
    }
  }

  template <class F>
  void nested(const char* key, F&& read) {
    used_.insert(key);
    if (j_.contains(key)) read(j_.at(key), ctx_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) config_error("unknown key " + ctx_ + "." + key);
    }
  }

 private:
  const json& j_;
  std::string ctx_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------- geometry

json write(const Interval& i) { return json::array({i.lo, i.hi}); }

void read(const json& j, const std::string& ctx, Interval& i) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    config_error(ctx + " must be [lo, hi]");
  }
  i = {j[0].get<double>(), j[1].get<double>()};
}

json write(const Extent& e) { return json::array({e.length, e.width, e.height}); }

void read(const json& j, const std::string& ctx, Extent& e) {
  if (!j.is_array() || j.size() != 3) config_error(ctx + " must be [length, width, height]");
  try {
    e = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception&) {
    config_error(ctx + " must hold numbers");
  }
}

json write(const FovSpec& f) {
  return {{"max_range", f.max_range},
          {"azimuth_half_angle", f.azimuth_half_angle},
          {"elevation_min", f.elevation_min},
          {"elevation_max", f.elevation_max}};
}

void read(const json& j, const std::string& ctx, FovSpec& f) {
  Fields in(j, ctx);
  in.get("max_range", f.max_range);
  in.get("azimuth_half_angle", f.azimuth_half_angle);
  in.get("elevation_min", f.elevation_min);
  in.get("elevation_max", f.elevation_max);
  in.finish();
}

json write(const SensorPose& s) {
  return {{"x", s.x},     {"y", s.y},         {"z", s.z},
          {"yaw", s.yaw}, {"pitch", s.pitch}, {"fov", write(s.fov)}};
}

void read(const json& j, const std::string& ctx, SensorPose& s) {
  Fields in(j, ctx);
  in.get("x", s.x);
  in.get("y", s.y);
  in.get("z", s.z);
  in.get("yaw", s.yaw);
  in.get("pitch", s.pitch);
  in.nested("fov", [&](const json& v, const std::string& c) { read(v, c, s.fov); });
  in.finish();
}

// ---------------------------------------------------------------- scene

json write(const ClassProfile& p) {
  return {{"label", p.label},
          {"length", write(p.length)},
          {"width", write(p.width)},
          {"height", write(p.height)}};
}

void read(const json& j, const std::string& ctx, ClassProfile& p) {
  Fields in(j, ctx);
  in.get("label", p.label);
  in.nested("length", [&](const json& v, const std::string& c) { read(v, c, p.length); });
  in.nested("width", [&](const json& v, const std::string& c) { read(v, c, p.width); });
  in.nested("height", [&](const json& v, const std::string& c) { read(v, c, p.height); });
  in.finish();
}

json write(const RadarDetectionModel& m) {
  return {{"deterministic", m.deterministic},   {"p_detect_visible", m.p_detect_visible},
          {"min_returns", m.min_returns},       {"max_returns", m.max_returns},
          {"position_sigma", m.position_sigma}, {"doppler_sigma", m.doppler_sigma},
          {"clutter_rate", m.clutter_rate},     {"quality", m.quality}};
}

void read(const json& j, const std::string& ctx, RadarDetectionModel& m) {
  Fields in(j, ctx);
  in.get("deterministic", m.deterministic);
  in.get("p_detect_visible", m.p_detect_visible);
  in.get("min_returns", m.min_returns);
  in.get("max_returns", m.max_returns);
  in.get("position_sigma", m.position_sigma);
  in.get("doppler_sigma", m.doppler_sigma);
  in.get("clutter_rate", m.clutter_rate);
  in.get("quality", m.quality);
  in.finish();
}

json write(const CameraModel& m) {
  return {{"fx", m.fx},
          {"fy", m.fy},
          {"cx", m.cx},
          {"cy", m.cy},
          {"image_width", m.image_width},
          {"image_height", m.image_height},
          {"max_detection_distance", m.max_detection_distance}};
}

void read(const json& j, const std::string& ctx, CameraModel& m) {
  Fields in(j, ctx);
  in.get("fx", m.fx);
  in.get("fy", m.fy);
  in.get("cx", m.cx);
  in.get("cy", m.cy);
  in.get("image_width", m.image_width);
  in.get("image_height", m.image_height);
  in.get("max_detection_distance", m.max_detection_distance);
  in.finish();
}

json write(const SceneConfig& s) {
  return {{"lanes_per_direction", s.lanes_per_direction},
          {"lane_width", s.lane_width},
          {"road_start_x", s.road_start_x},
          {"road_end_x", s.road_end_x},
          {"duration", s.duration},
          {"frame_rate", s.frame_rate},
          {"vehicle_count", s.vehicle_count},
          {"truck_ratio", s.truck_ratio},
          {"car", write(s.car)},
          {"truck", write(s.truck)},
          {"speed", write(s.speed)},
          {"min_gap", s.min_gap},
          {"seed", s.seed},
          {"surface_samples", s.surface_samples},
          {"radar", write(s.radar)},
          {"radar_model", write(s.radar_model)},
          {"camera_enabled", s.camera_enabled},
          {"camera", write(s.camera)},
          {"camera_model", write(s.camera_model)}};
}

void read(const json& j, const std::string& ctx, SceneConfig& s) {
  Fields in(j, ctx);
  in.get("lanes_per_direction", s.lanes_per_direction);
  in.get("lane_width", s.lane_width);
  in.get("road_start_x", s.road_start_x);
  in.get("road_end_x", s.road_end_x);
  in.get("duration", s.duration);
  in.get("frame_rate", s.frame_rate);
  in.get("vehicle_count", s.vehicle_count);
  in.get("truck_ratio", s.truck_ratio);
  in.nested("car", [&](const json& v, const std::string& c) { read(v, c, s.car); });
  in.nested("truck", [&](const json& v, const std::string& c) { read(v, c, s.truck); });
  in.nested("speed", [&](const json& v, const std::string& c) { read(v, c, s.speed); });
  in.get("min_gap", s.min_gap);
  in.get("seed", s.seed);
  in.get("surface_samples", s.surface_samples);
  in.nested("radar", [&](const json& v, const std::string& c) { read(v, c, s.radar); });
  in.nested("radar_model",
            [&](const json& v, const std::string& c) { read(v, c, s.radar_model); });
  in.get("camera_enabled", s.camera_enabled);
  in.nested("camera", [&](const json& v, const std::string& c) { read(v, c, s.camera); });
  in.nested("camera_model",
            [&](const json& v, const std::string& c) { read(v, c, s.camera_model); });
  in.finish();
}

// ---------------------------------------------------------------- estimators

json write(const GridSpec2D& g) {
  return {{"origin_x", g.origin_x},
          {"origin_y", g.origin_y},
          {"width", g.width},
          {"height", g.height},
          {"resolution", g.resolution}};
}

void read(const json& j, const std::string& ctx, GridSpec2D& g) {
  Fields in(j, ctx);
  in.get("origin_x", g.origin_x);
  in.get("origin_y", g.origin_y);
  in.get("width", g.width);
  in.get("height", g.height);
  in.get("resolution", g.resolution);
  in.finish();
}

json write(const SphericalGridSpec& s) {
  return {{"r_min", s.r_min},
          {"r_max", s.r_max},
          {"n_range", s.n_range},
          {"azimuth_min", s.azimuth_min},
          {"azimuth_max", s.azimuth_max},
          {"n_azimuth", s.n_azimuth},
          {"elevation_min", s.elevation_min},
          {"elevation_max", s.elevation_max},
          {"n_elevation", s.n_elevation}};
}

void read(const json& j, const std::string& ctx, SphericalGridSpec& s) {
  Fields in(j, ctx);
  in.get("r_min", s.r_min);
  in.get("r_max", s.r_max);
  in.get("n_range", s.n_range);
  in.get("azimuth_min", s.azimuth_min);
  in.get("azimuth_max", s.azimuth_max);
  in.get("n_azimuth", s.n_azimuth);
  in.get("elevation_min", s.elevation_min);
  in.get("elevation_max", s.elevation_max);
  in.get("n_elevation", s.n_elevation);
  in.finish();
}

json write(const RadarFilterConfig& f) {
  return {{"min_quality", f.min_quality},
          {"elevation", write(f.elevation)},
          {"rcs", write(f.rcs)},
          {"min_abs_doppler", f.min_abs_doppler}};
}

void read(const json& j, const std::string& ctx, RadarFilterConfig& f) {
  Fields in(j, ctx);
  in.get("min_quality", f.min_quality);
  in.nested("elevation", [&](const json& v, const std::string& c) { read(v, c, f.elevation); });
  in.nested("rcs", [&](const json& v, const std::string& c) { read(v, c, f.rcs); });
  in.get("min_abs_doppler", f.min_abs_doppler);
  in.finish();
}

json write(const IsmConfig& m) {
  const auto& c = m.covariance;
  return {{"peak_occupancy", m.peak_occupancy},
          {"covariance", {{c(0, 0), c(0, 1)}, {c(1, 0), c(1, 1)}}},
          {"sigma_range", m.sigma_range},
          {"sigma_azimuth", m.sigma_azimuth},
          {"sigma_elevation", m.sigma_elevation},
          {"free_space_decrement", m.free_space_decrement},
          {"occupancy_prior", m.occupancy_prior}};
}

void read(const json& j, const std::string& ctx, IsmConfig& m) {
  Fields in(j, ctx);
  in.get("peak_occupancy", m.peak_occupancy);
  in.nested("covariance", [&](const json& v, const std::string& c) {
    std::vector<std::vector<double>> rows;
    try {
      rows = v.get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
      config_error(c + " must be a 2x2 matrix");
    }
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
      config_error(c + " must be a 2x2 matrix");
    }
    m.covariance << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
  });
  in.get("sigma_range", m.sigma_range);
  in.get("sigma_azimuth", m.sigma_azimuth);
  in.get("sigma_elevation", m.sigma_elevation);
  in.get("free_space_decrement", m.free_space_decrement);
  in.get("occupancy_prior", m.occupancy_prior);
  in.finish();
}

json write(const EstimatorConfig& e) {
  json prior = json::object();
  for (const auto& [label, extent] : e.size_prior) prior[label] = write(extent);
  return {{"output", write(e.output)},
          {"filter", write(e.filter)},
          {"ism", write(e.ism)},
          {"decay_rate", e.decay.decay_rate},
          {"occupied_above", e.threshold.occupied_above},
          {"spherical", write(e.spherical)},
          {"slice_height", e.slice_height},
          {"graded", e.graded},
          {"reference_margin", e.reference_margin},
          {"size_prior", prior},
          {"voxel_z_min", e.voxel_z_min},
          {"voxel_z_max", e.voxel_z_max},
          {"voxel_layers", e.voxel_layers},
          {"occupied_value", e.occupied_value},
          {"squash_z_lo", e.squash_z_lo},
          {"squash_z_hi", e.squash_z_hi},
          {"camera_decay_rate", e.camera_decay.decay_rate},
          {"camera_heading_prior",
           e.camera_heading_prior ? json(*e.camera_heading_prior) : json(nullptr)}};
}

void read(const json& j, const std::string& ctx, EstimatorConfig& e) {
  Fields in(j, ctx);
  in.nested("output", [&](const json& v, const std::string& c) { read(v, c, e.output); });
  in.nested("filter", [&](const json& v, const std::string& c) { read(v, c, e.filter); });
  in.nested("ism", [&](const json& v, const std::string& c) { read(v, c, e.ism); });
  in.get("decay_rate", e.decay.decay_rate);
  in.get("occupied_above", e.threshold.occupied_above);
  in.nested("spherical", [&](const json& v, const std::string& c) { read(v, c, e.spherical); });
  in.get("slice_height", e.slice_height);
  in.get("graded", e.graded);
  in.get("reference_margin", e.reference_margin);
  in.nested("size_prior", [&](const json& v, const std::string& c) {
    if (!v.is_object()) config_error(c + " must map class names to extents");
    e.size_prior.clear();
    for (const auto& [label, extent] : v.items()) read(extent, c + "." + label, e.size_prior[label]);
  });
  in.get("voxel_z_min", e.voxel_z_min);
  in.get("voxel_z_max", e.voxel_z_max);
  in.get("voxel_layers", e.voxel_layers);
  in.get("occupied_value", e.occupied_value);
  in.get("squash_z_lo", e.squash_z_lo);
  in.get("squash_z_hi", e.squash_z_hi);
  in.get("camera_decay_rate", e.camera_decay.decay_rate);
  in.nested("camera_heading_prior", [&](const json& v, const std::string& c) {
    if (v.is_null()) {
      e.camera_heading_prior.reset();
    } else if (v.is_number()) {
      e.camera_heading_prior = v.get<double>();
    } else {
      config_error(c + " must be a number or null");
    }
  });
  in.finish();
}

}  // namespace

void RunConfig::validate() const {
  try {
    scene.validate();
    estimators.validate();
    AssociationTolerance{evaluation.position_radius, evaluation.doppler_tolerance}.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (!(evaluation.vis_threshold > 0.0 && evaluation.vis_threshold <= 1.0)) {
    config_error("evaluation.vis_threshold must lie in (0, 1]");
  }
  if (estimator == EstimatorKind::kCamera3D && !scene.camera_enabled && !input) {
    config_error("camera3d needs scene.camera_enabled");
  }
  if (input) {
    for (const auto& p : {input->measurements, input->labels}) {
      if (!std::filesystem::exists(p)) config_error("input file '" + p.string() + "' does not exist");
    }
  }
}

nlohmann::json to_json(const RunConfig& cfg) {
  json j;
  j["scene"] = write(cfg.scene);
  if (cfg.input) {
    j["input"] = {{"measurements", cfg.input->measurements.string()},
                  {"labels", cfg.input->labels.string()}};
  }
  j["estimator"] = std::string(to_string(cfg.estimator));
  j["estimators"] = write(cfg.estimators);
  j["evaluation"] = {{"position_radius", cfg.evaluation.position_radius},
                     {"doppler_tolerance", cfg.evaluation.doppler_tolerance},
                     {"vis_threshold", cfg.evaluation.vis_threshold}};
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
  RunConfig cfg;
  Fields in(doc, "config");
  in.nested("scene", [&](const json& v, const std::string& c) { read(v, c, cfg.scene); });
  in.nested("input", [&](const json& v, const std::string& c) {
    Fields f(v, c);
    std::string measurements;
    std::string labels;
    f.get("measurements", measurements);
    f.get("labels", labels);
    f.finish();
    if (measurements.empty() || labels.empty()) {
      config_error(c + " needs both 'measurements' and 'labels'");
    }
    cfg.input = InputPaths{measurements, labels};
  });
  std::string estimator(to_string(cfg.estimator));
  in.get("estimator", estimator);
  try {
    cfg.estimator = parse_estimator_kind(estimator);
  } catch (const Error& e) {
    config_error(e.what());
  }
  in.nested("estimators", [&](const json& v, const std::string& c) { read(v, c, cfg.estimators); });
  in.nested("evaluation", [&](const json& v, const std::string& c) {
    Fields f(v, c);
    f.get("position_radius", cfg.evaluation.position_radius);
    f.get("doppler_tolerance", cfg.evaluation.doppler_tolerance);
    f.get("vis_threshold", cfg.evaluation.vis_threshold);
    f.finish();
  });
  std::string out = cfg.output_dir.string();
  in.get("output_dir", out);
  cfg.output_dir = out;
  in.finish();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    config_error("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(doc);
}

void set_path(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos
                                                                          : dot - start);
    if (key.empty() || !node->is_object()) config_error("bad parameter path '" + dotted + "'");
    if (dot == std::string::npos) {
      if (!node->contains(key)) config_error("unknown parameter '" + dotted + "'");
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) config_error("unknown parameter '" + dotted + "'");
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace sensorvis::harness
