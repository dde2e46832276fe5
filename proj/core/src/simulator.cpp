#include "sensorvis/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "sensorvis/error.hpp"

namespace sensorvis {
namespace {

constexpr char kModule[] = "scene-simulator";

// Camera-frame depth below which box parts are cut off before projection.
constexpr double kNearPlane = 0.1;

void require(bool ok, const char* message) {
  if (!ok) throw Error(kModule, ErrorKind::kInvalidArgument, message);
}

bool valid_range(const Interval& i) { return i.well_ordered() && i.lo > 0.0; }

struct Vehicle {
  int direction = 1;
  int lane = 0;
  double speed = 0.0;
  double t_enter = 0.0;
  Extent extent;
  std::string label;
};

double uniform(std::mt19937_64& rng, const Interval& i) {
  if (i.lo == i.hi) return i.lo;
  return std::uniform_real_distribution<double>(i.lo, i.hi)(rng);
}

double rcs_for(const std::string& label) { return label == "truck" ? 20.0 : 10.0; }

double radial_speed(const ObjectState& obj, const Vec3& sensor, const Vec3& p) {
  const Vec3 d = p - sensor;
  const double n = d.norm();
  if (n == 0.0) return 0.0;
  return Vec3(obj.vx, obj.vy, 0.0).dot(d) / n;
}

// One rectangular face: center, two in-plane half axes and outward normal.
struct Face {
  Vec3 center;
  Vec3 e1;  // unit
  Vec3 e2;  // unit
  double a = 0.0;  // extent along e1
  double b = 0.0;  // extent along e2
  Vec3 normal;
};

}  // namespace

void RadarDetectionModel::validate() const {
  require(p_detect_visible >= 0.0 && p_detect_visible <= 1.0,
          "p_detect_visible must lie in [0, 1]");
  require(min_returns >= 1 && max_returns >= min_returns,
          "returns per object must satisfy 1 <= min <= max");
  require(position_sigma >= 0.0 && doppler_sigma >= 0.0, "noise sigmas must be >= 0");
  require(clutter_rate >= 0.0, "clutter rate must be >= 0");
  require(quality >= 0.0 && quality <= 1.0, "quality must lie in [0, 1]");
}

void CameraModel::validate() const {
  require(fx > 0.0 && fy > 0.0, "focal lengths must be positive");
  require(image_width > 0 && image_height > 0, "image size must be positive");
  require(max_detection_distance > 0.0, "max detection distance must be positive");
}

Eigen::Matrix3d CameraModel::rotation(const SensorPose& pose) const {
  return camera_rotation(pose);
}

Eigen::Matrix3d CameraModel::intrinsics() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Projection CameraModel::projection(const SensorPose& pose) const {
  const Eigen::Matrix3d r = rotation(pose);
  Projection p;
  p.leftCols<3>() = intrinsics() * r;
  p.col(3) = -intrinsics() * r * pose.position();
  return p;
}

std::optional<Vec2> CameraModel::project(const SensorPose& pose, const Vec3& p) const {
  const Vec3 c = rotation(pose) * (p - pose.position());
  if (c.z() <= 1e-6) return std::nullopt;
  return Vec2(fx * c.x() / c.z() + cx, fy * c.y() / c.z() + cy);
}

Eigen::Matrix3d CameraModel::ground_homography(const SensorPose& pose) const {
  const Eigen::Matrix3d r = rotation(pose);
  const Eigen::Matrix3d k = intrinsics();
  Eigen::Matrix3d g;
  g.col(0) = r.col(0);
  g.col(1) = r.col(1);
  g.col(2) = -r * pose.position();
  return (k * g).inverse();
}

void SceneConfig::validate() const {
  require(lanes_per_direction >= 1, "need at least one lane per direction");
  require(lane_width > 0.0, "lane width must be positive");
  require(road_end_x > road_start_x, "road must have positive length");
  require(duration > 0.0, "duration must be positive");
  require(frame_rate > 0.0, "frame rate must be positive");
  require(vehicle_count >= 0, "vehicle count must be >= 0");
  require(truck_ratio >= 0.0 && truck_ratio <= 1.0, "truck ratio must lie in [0, 1]");
  for (const ClassProfile* p : {&car, &truck}) {
    require(valid_range(p->length) && valid_range(p->width) && valid_range(p->height),
            "class extents must be positive, ordered ranges");
  }
  require(valid_range(speed), "speed range must be positive and ordered");
  require(min_gap >= 0.0, "minimum gap must be >= 0");
  require(surface_samples >= 1, "need at least one surface sample");
  radar.validate();
  radar_model.validate();
  if (camera_enabled) {
    camera.validate();
    camera_model.validate();
  }
}

int SceneConfig::frame_count() const {
  return static_cast<int>(std::llround(duration * frame_rate));
}

double SceneConfig::lane_center_y(int direction, int lane) const {
  return -direction * (lane + 0.5) * lane_width;
}

std::vector<Frame> generate_trajectories(const SceneConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.lanes_per_direction;
  const double road = cfg.road_end_x - cfg.road_start_x;
  const double frame_dt = 1.0 / cfg.frame_rate;

  // Inner lanes are the fast ones.
  std::vector<double> lane_speed(2 * n);
  for (int d = 0; d < 2; ++d) {
    std::vector<double> s(n);
    for (double& v : s) v = uniform(rng, cfg.speed);
    std::sort(s.begin(), s.end(), std::greater<>());
    std::copy(s.begin(), s.end(), lane_speed.begin() + d * n);
  }
  const int first_truck_lane = std::max(0, n - 2);

  std::vector<Vehicle> vehicles;
  std::bernoulli_distribution is_truck(cfg.truck_ratio);
  std::uniform_int_distribution<int> pick_direction(0, 1);
  for (int k = 0; k < cfg.vehicle_count; ++k) {
    const bool truck = is_truck(rng);
    const ClassProfile& profile = truck ? cfg.truck : cfg.car;
    Vehicle v;
    v.label = profile.label;
    v.extent = {uniform(rng, profile.length), uniform(rng, profile.width),
                uniform(rng, profile.height)};
    std::uniform_int_distribution<int> pick_lane(truck ? first_truck_lane : 0, n - 1);
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      const int d = pick_direction(rng);
      v.direction = d == 0 ? 1 : -1;
      v.lane = pick_lane(rng);
      v.speed = lane_speed[d * n + v.lane];
      const double transit = road / v.speed;
      v.t_enter = std::uniform_real_distribution<double>(
          -transit + frame_dt, cfg.duration - frame_dt)(rng);
      placed = std::none_of(vehicles.begin(), vehicles.end(), [&](const Vehicle& o) {
        if (o.direction != v.direction || o.lane != v.lane) return false;
        const double gap = std::abs(o.t_enter - v.t_enter) * v.speed -
                           0.5 * (o.extent.length + v.extent.length);
        return gap < cfg.min_gap;
      });
    }
    if (placed) vehicles.push_back(v);
  }

  std::vector<Frame> frames(cfg.frame_count());
  for (int f = 0; f < cfg.frame_count(); ++f) {
    Frame& frame = frames[f];
    frame.t = f * frame_dt;
    for (std::size_t id = 0; id < vehicles.size(); ++id) {
      const Vehicle& v = vehicles[id];
      const double travelled = v.speed * (frame.t - v.t_enter);
      if (travelled < 0.0 || travelled > road) continue;
      ObjectState o;
      o.id = static_cast<int>(id);
      o.t = frame.t;
      o.x = v.direction > 0 ? cfg.road_start_x + travelled : cfg.road_end_x - travelled;
      o.y = cfg.lane_center_y(v.direction, v.lane);
      o.yaw = v.direction > 0 ? 0.0 : kPi;
      o.vx = v.direction * v.speed;
      o.extent = v.extent;
      o.label = v.label;
      frame.objects.push_back(std::move(o));
    }
  }
  return frames;
}

std::vector<Vec3> facing_surface_samples(const OrientedBox& box, const Vec3& viewpoint,
                                         int k) {
  const OrientedRect& fp = box.footprint;
  const Vec3 u(fp.axis_u().x(), fp.axis_u().y(), 0.0);
  const Vec3 v(fp.axis_v().x(), fp.axis_v().y(), 0.0);
  const Vec3 z = Vec3::UnitZ();
  const Vec3 mid(fp.center.x(), fp.center.y(), box.base_z + 0.5 * box.height);
  const double l = fp.length;
  const double w = fp.width;
  const double h = box.height;
  const Face faces[] = {
      {mid + u * (l / 2), v, z, w, h, u},
      {mid - u * (l / 2), v, z, w, h, -u},
      {mid + v * (w / 2), u, z, l, h, v},
      {mid - v * (w / 2), u, z, l, h, -v},
      {mid + z * (h / 2), u, v, l, w, z},
      {mid - z * (h / 2), u, v, l, w, -z},
  };
  std::vector<const Face*> facing;
  double total_area = 0.0;
  for (const Face& f : faces) {
    if (f.normal.dot(viewpoint - f.center) > 0.0) {
      facing.push_back(&f);
      total_area += f.a * f.b;
    }
  }
  std::vector<Vec3> out;
  for (const Face* f : facing) {
    const double share = k * f->a * f->b / total_area;
    const int n = std::max(1, static_cast<int>(std::lround(share)));
    const int cols = std::max(1, static_cast<int>(std::lround(std::sqrt(n * f->a / f->b))));
    const int rows = std::max(1, static_cast<int>(std::lround(static_cast<double>(n) / cols)));
    // Lattice including the face edges, so grazing lines of sight count.
    auto offset = [](int i, int n) { return n == 1 ? 0.0 : static_cast<double>(i) / (n - 1) - 0.5; };
    for (int i = 0; i < cols; ++i) {
      for (int j = 0; j < rows; ++j) {
        out.push_back(f->center + f->e1 * (f->a * offset(i, cols)) +
                      f->e2 * (f->b * offset(j, rows)));
      }
    }
  }
  return out;
}

std::vector<Vec3> visible_surface_points(std::span<const ObjectState> objects,
                                         const SensorPose& sensor,
                                         const ObjectState& target, int k) {
  const Vec3 s = sensor.position();
  std::vector<OrientedBox> others;
  for (const ObjectState& o : objects) {
    if (o.id != target.id) others.push_back(o.box());
  }
  std::vector<Vec3> out;
  for (const Vec3& p : facing_surface_samples(target.box(), s, k)) {
    const bool blocked = std::any_of(others.begin(), others.end(), [&](const OrientedBox& b) {
      return segment_blocked(s, p, b);
    });
    if (!blocked) out.push_back(p);
  }
  return out;
}

bool occlusion_oracle(std::span<const ObjectState> objects, const SensorPose& sensor,
                      const ObjectState& target, int k) {
  return visible_surface_points(objects, sensor, target, k).empty();
}

std::vector<std::vector<Measurement>> simulate_radar(std::span<const Frame> frames,
                                                     const SensorPose& sensor,
                                                     const RadarDetectionModel& model,
                                                     std::uint64_t seed,
                                                     int surface_samples) {
  model.validate();
  sensor.validate();
  std::seed_seq seq{seed, std::uint64_t{0x5241444152}};
  std::mt19937_64 rng(seq);
  std::bernoulli_distribution detect(model.deterministic ? 1.0 : model.p_detect_visible);
  std::uniform_int_distribution<int> returns(model.min_returns, model.max_returns);
  std::normal_distribution<double> unit(0.0, 1.0);
  const Vec3 s = sensor.position();

  std::vector<std::vector<Measurement>> out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Frame& frame = frames[f];
    for (const ObjectState& obj : frame.objects) {
      std::vector<Vec3> points =
          visible_surface_points(frame.objects, sensor, obj, surface_samples);
      std::erase_if(points, [&](const Vec3& p) { return !in_fov_3d(sensor, p); });
      if (points.empty()) continue;
      Measurement m;
      m.quality = model.quality;
      m.rcs = rcs_for(obj.label);
      m.timestamp = frame.t;
      m.source_id = obj.id;
      if (model.deterministic) {
        const Vec3 p = *std::min_element(points.begin(), points.end(),
                                         [&](const Vec3& a, const Vec3& b) {
                                           return (a - s).squaredNorm() < (b - s).squaredNorm();
                                         });
        m.position = CartesianPosition{p.x(), p.y(), p.z()};
        m.doppler = radial_speed(obj, s, p);
        out[f].push_back(m);
        continue;
      }
      if (!detect(rng)) continue;
      const int n = returns(rng);
      std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
      for (int r = 0; r < n; ++r) {
        const Vec3 base = points[pick(rng)];
        const Vec3 p = base + model.position_sigma * Vec3(unit(rng), unit(rng), unit(rng));
        m.position = CartesianPosition{p.x(), p.y(), p.z()};
        m.doppler = radial_speed(obj, s, base) + model.doppler_sigma * unit(rng);
        if (in_fov_3d(sensor, p)) out[f].push_back(m);
      }
    }
    if (model.clutter_rate > 0.0 && !model.deterministic) {
      const int n = std::poisson_distribution<int>(model.clutter_rate)(rng);
      const double reach = sensor.fov.max_range;
      std::uniform_real_distribution<double> xy(-reach, reach);
      std::uniform_real_distribution<double> zc(0.0, 0.5);
      for (int c = 0; c < n; ++c) {
        const Vec3 p(sensor.x + xy(rng), sensor.y + xy(rng), zc(rng));
        if (!in_fov_3d(sensor, p)) continue;
        Measurement m;
        m.position = CartesianPosition{p.x(), p.y(), p.z()};
        m.doppler = 0.3 * unit(rng);
        m.quality = 0.3;
        m.rcs = -5.0;
        m.timestamp = frame.t;
        out[f].push_back(m);
      }
    }
  }
  return out;
}

std::vector<std::vector<BoundingBox2D>> simulate_camera(std::span<const Frame> frames,
                                                        const SensorPose& camera,
                                                        const CameraModel& model,
                                                        int surface_samples) {
  model.validate();
  camera.validate();
  const Projection proj = model.projection(camera);
  std::vector<std::vector<BoundingBox2D>> out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Frame& frame = frames[f];
    for (const ObjectState& obj : frame.objects) {
      if (obj.footprint().distance(camera.ground()) > model.max_detection_distance) continue;
      const auto bounds = project_box_bounds(proj, obj.box(), kNearPlane);
      if (!bounds) continue;
      const auto [u_min, v_min, u_max, v_max] = *bounds;
      // Boxes are amodal: they keep the full projection so the bottom edge
      // still marks the ground contact of truncated objects.
      if (u_max <= 0.0 || v_max <= 0.0 || u_min >= model.image_width ||
          v_min >= model.image_height) {
        continue;
      }
      if (occlusion_oracle(frame.objects, camera, obj, surface_samples)) continue;
      out[f].push_back({u_min, v_min, u_max, v_max, obj.label, 1.0, obj.id});
    }
  }
  return out;
}

GroundTruthLog generate_scene(const SceneConfig& cfg) {
  GroundTruthLog log;
  log.frames = generate_trajectories(cfg);
  log.occluded.resize(log.frames.size());
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    const Frame& frame = log.frames[f];
    for (const ObjectState& obj : frame.objects) {
      log.occluded[f].push_back(
          occlusion_oracle(frame.objects, cfg.radar, obj, cfg.surface_samples) ? 1 : 0);
    }
  }
  auto radar = simulate_radar(log.frames, cfg.radar, cfg.radar_model, cfg.seed,
                              cfg.surface_samples);
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    log.frames[f].radar = std::move(radar[f]);
  }
  if (cfg.camera_enabled) {
    auto boxes = simulate_camera(log.frames, cfg.camera, cfg.camera_model,
                                 cfg.surface_samples);
    for (std::size_t f = 0; f < log.frames.size(); ++f) {
      log.frames[f].boxes = std::move(boxes[f]);
    }
  }
  return log;
}

}  // namespace sensorvis
