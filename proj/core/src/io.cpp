#include "sensorvis/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sensorvis/error.hpp"

namespace sensorvis {
namespace {

using nlohmann::json;

constexpr char kModule[] = "data-io";
constexpr char kMeasurementSchema[] = "sensorvis.measurements";
constexpr char kLabelSchema[] = "sensorvis.labels";
constexpr char kReportSchema[] = "sensorvis.report";
constexpr char kGridMagic[] = "SVGRID";

[[noreturn]] void data_error(const std::string& msg) {
  throw Error(kModule, ErrorKind::kData, msg);
}

[[noreturn]] void line_error(std::size_t line, const std::string& msg) {
  data_error("line " + std::to_string(line) + ": " + msg);
}

void check_header(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema) {
    data_error(std::string("missing '") + schema + "' header");
  }
  const int version = j.at("version").get<int>();
  if (version != kFormatVersion) {
    data_error("unsupported " + std::string(schema) + " version " +
               std::to_string(version) + " (expected " +
               std::to_string(kFormatVersion) + ")");
  }
}

json header(const char* schema) { return {{"schema", schema}, {"version", kFormatVersion}}; }

// Reads non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(n, line);
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) data_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) data_error("cannot open '" + path.string() + "'");
  return in;
}

// ------------------------------------------------------------ measurement json

json to_json(const Measurement& m) {
  json j;
  j["kind"] = m.kind == MeasurementKind::kRadar ? "radar" : "camera_point";
  if (const auto* c = std::get_if<CartesianPosition>(&m.position)) {
    j["cartesian"] = {c->x, c->y, c->z};
  } else {
    const auto& p = std::get<PolarPosition>(m.position);
    j["polar"] = {p.r, p.azimuth, p.elevation};
  }
  j["doppler"] = m.doppler;
  j["quality"] = m.quality;
  j["rcs"] = m.rcs;
  j["timestamp"] = m.timestamp;
  j["source"] = m.source_id;
  return j;
}

Measurement measurement_from_json(const json& j) {
  Measurement m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "radar") {
    m.kind = MeasurementKind::kRadar;
  } else if (kind == "camera_point") {
    m.kind = MeasurementKind::kCameraPoint;
  } else {
    data_error("unknown measurement kind '" + kind + "'");
  }
  if (j.contains("cartesian")) {
    const auto& c = j["cartesian"];
    if (c.size() != 3) data_error("cartesian position needs 3 values");
    m.position = CartesianPosition{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
  } else {
    const auto& p = j.at("polar");
    if (p.size() != 3) data_error("polar position needs 3 values");
    m.position = PolarPosition{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  }
  m.doppler = j.at("doppler").get<double>();
  m.quality = j.at("quality").get<double>();
  m.rcs = j.at("rcs").get<double>();
  m.timestamp = j.at("timestamp").get<double>();
  m.source_id = j.at("source").get<int>();
  return m;
}

json to_json(const BoundingBox2D& b) {
  return {{"u_min", b.u_min}, {"v_min", b.v_min}, {"u_max", b.u_max},
          {"v_max", b.v_max}, {"class", b.label},  {"confidence", b.confidence},
          {"source", b.source_id}};
}

BoundingBox2D box_from_json(const json& j) {
  BoundingBox2D b;
  b.u_min = j.at("u_min").get<double>();
  b.v_min = j.at("v_min").get<double>();
  b.u_max = j.at("u_max").get<double>();
  b.v_max = j.at("v_max").get<double>();
  b.label = j.at("class").get<std::string>();
  b.confidence = j.at("confidence").get<double>();
  b.source_id = j.at("source").get<int>();
  return b;
}

// --------------------------------------------------------------- report json

json to_json(const ConfusionCounts& c) {
  return {{"tv", c.tv}, {"fv", c.fv}, {"ti", c.ti}, {"fi", c.fi}};
}

ConfusionCounts counts_from_json(const json& j) {
  return {j.at("tv").get<std::uint64_t>(), j.at("fv").get<std::uint64_t>(),
          j.at("ti").get<std::uint64_t>(), j.at("fi").get<std::uint64_t>()};
}

json to_json(const std::optional<Ratio>& r) {
  if (!r) return nullptr;
  return {{"num", r->num}, {"den", r->den}, {"value", r->value()}};
}

std::optional<Ratio> ratio_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  Ratio r{j.at("num").get<std::uint64_t>(), j.at("den").get<std::uint64_t>()};
  if (r.den == 0 || r.num > r.den) data_error("ratio must satisfy 0 <= num <= den, den > 0");
  return r;
}

// ------------------------------------------------------------- binary helpers

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  template <class T>
  void le(T v) {
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(v);
    unsigned char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    bytes(b, sizeof(T));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void i32(int v) { le(static_cast<std::int32_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) data_error("grid snapshot is truncated");
  }
  template <class T>
  T le() {
    unsigned char b[sizeof(T)];
    bytes(b, sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(b[i]) << (8 * i);
    }
    return static_cast<T>(u);
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  int i32() { return le<std::int32_t>(); }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

enum GridKind : std::uint8_t {
  kKindGrid2D = 1,
  kKindVisibility = 2,
  kKindPolar = 3,
  kKindSpherical = 4,
  kKindVoxel = 5,
};

void write_spec(Writer& w, const GridSpec2D& s) {
  w.f64(s.origin_x);
  w.f64(s.origin_y);
  w.f64(s.resolution);
  w.i32(s.width);
  w.i32(s.height);
}

void write_spec(Writer& w, const PolarGridSpec& s) {
  w.f64(s.r_min);
  w.f64(s.r_max);
  w.f64(s.azimuth_min);
  w.f64(s.azimuth_max);
  w.i32(s.n_range);
  w.i32(s.n_azimuth);
}

void write_spec(Writer& w, const SphericalGridSpec& s) {
  w.f64(s.r_min);
  w.f64(s.r_max);
  w.f64(s.azimuth_min);
  w.f64(s.azimuth_max);
  w.f64(s.elevation_min);
  w.f64(s.elevation_max);
  w.i32(s.n_range);
  w.i32(s.n_azimuth);
  w.i32(s.n_elevation);
}

void write_spec(Writer& w, const VoxelGridSpec& s) {
  write_spec(w, s.base);
  w.f64(s.z_min);
  w.f64(s.z_max);
  w.i32(s.n_z);
}

GridSpec2D read_grid2d_spec(Reader& r) {
  GridSpec2D s;
  s.origin_x = r.f64();
  s.origin_y = r.f64();
  s.resolution = r.f64();
  s.width = r.i32();
  s.height = r.i32();
  return s;
}

PolarGridSpec read_polar_spec(Reader& r) {
  PolarGridSpec s;
  s.r_min = r.f64();
  s.r_max = r.f64();
  s.azimuth_min = r.f64();
  s.azimuth_max = r.f64();
  s.n_range = r.i32();
  s.n_azimuth = r.i32();
  return s;
}

SphericalGridSpec read_spherical_spec(Reader& r) {
  SphericalGridSpec s;
  s.r_min = r.f64();
  s.r_max = r.f64();
  s.azimuth_min = r.f64();
  s.azimuth_max = r.f64();
  s.elevation_min = r.f64();
  s.elevation_max = r.f64();
  s.n_range = r.i32();
  s.n_azimuth = r.i32();
  s.n_elevation = r.i32();
  return s;
}

VoxelGridSpec read_voxel_spec(Reader& r) {
  VoxelGridSpec s;
  s.base = read_grid2d_spec(r);
  s.z_min = r.f64();
  s.z_max = r.f64();
  s.n_z = r.i32();
  return s;
}

std::uint16_t encode(float v) {
  if (!(v >= 0.0f && v <= 1.0f)) data_error("grid value outside [0, 1] cannot be stored");
  return static_cast<std::uint16_t>(std::lround(static_cast<double>(v) * 65535.0));
}

float decode(std::uint16_t q) { return static_cast<float>(q / 65535.0); }

void write_payload(Writer& w, std::span<const float> values,
                   const std::vector<std::uint8_t>* mask) {
  w.le(static_cast<std::uint64_t>(values.size()));
  for (float v : values) w.le(encode(v));
  if (mask) {
    for (std::uint8_t m : *mask) w.le<std::uint8_t>(m ? 1 : 0);
  }
}

std::vector<float> read_values(Reader& r, std::size_t expected) {
  const auto count = r.le<std::uint64_t>();
  if (count != expected) {
    data_error("grid payload has " + std::to_string(count) + " values, spec needs " +
               std::to_string(expected));
  }
  std::vector<float> v(count);
  for (float& x : v) x = decode(r.le<std::uint16_t>());
  return v;
}

template <class Spec>
void validate_spec(const Spec& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    data_error(std::string("invalid grid spec: ") + e.what());
  }
}

}  // namespace

// ------------------------------------------------------------------ measurements

void save_measurement_log(const MeasurementLog& log, std::ostream& out) {
  out << header(kMeasurementSchema).dump() << '\n';
  for (const SensorFrame& f : log.frames) {
    json j;
    j["t"] = f.t;
    j["sensor"] = f.sensor;
    j["measurements"] = json::array();
    for (const Measurement& m : f.measurements) j["measurements"].push_back(to_json(m));
    j["boxes"] = json::array();
    for (const BoundingBox2D& b : f.boxes) j["boxes"].push_back(to_json(b));
    out << j.dump() << '\n';
  }
}

MeasurementLog load_measurement_log(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) data_error("measurement log is empty (no header)");
  MeasurementLog log;
  double last_t = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& [n, text] = lines[k];
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      line_error(n, std::string("malformed JSON: ") + e.what());
    }
    if (k == 0) {
      check_header(j, kMeasurementSchema);
      continue;
    }
    try {
      SensorFrame f;
      f.t = j.at("t").get<double>();
      f.sensor = j.at("sensor").get<std::string>();
      for (const json& m : j.at("measurements")) f.measurements.push_back(measurement_from_json(m));
      if (j.contains("boxes")) {
        for (const json& b : j["boxes"]) f.boxes.push_back(box_from_json(b));
      }
      if (f.t < last_t) line_error(n, "timestamps must be non-decreasing");
      last_t = f.t;
      log.frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      line_error(n, e.what());
    } catch (const Error& e) {
      if (std::string(e.what()).rfind("data-io: line", 0) == 0) throw;
      line_error(n, e.what());
    }
  }
  return log;
}

void save_measurement_log(const MeasurementLog& log, const std::filesystem::path& path) {
  auto out = open_out(path);
  save_measurement_log(log, out);
}

MeasurementLog load_measurement_log(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_measurement_log(in);
}

MeasurementLog measurement_log_from_frames(std::span<const Frame> frames) {
  MeasurementLog log;
  const bool camera = std::any_of(frames.begin(), frames.end(),
                                  [](const Frame& f) { return !f.boxes.empty(); });
  for (const Frame& f : frames) {
    log.frames.push_back({f.t, "radar", f.radar, {}});
    if (camera) log.frames.push_back({f.t, "camera", {}, f.boxes});
  }
  return log;
}

// ------------------------------------------------------------------------ labels

void LabelTrack::validate() const {
  if (knots.size() < 2) {
    data_error("track " + std::to_string(id) + " needs at least two knots");
  }
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k].t > knots[k - 1].t)) {
      data_error("track " + std::to_string(id) + " knot times must increase strictly");
    }
  }
  if (extent && !(extent->length > 0.0 && extent->width > 0.0 && extent->height > 0.0)) {
    data_error("track " + std::to_string(id) + " extent must be positive");
  }
}

void save_labels(const LabelFile& labels, std::ostream& out) {
  out << header(kLabelSchema).dump() << '\n';
  for (const LabelTrack& t : labels.tracks) {
    json j;
    j["id"] = t.id;
    if (t.label) j["class"] = *t.label;
    if (t.extent) j["extent"] = {t.extent->length, t.extent->width, t.extent->height};
    j["knots"] = json::array();
    for (const LabelKnot& k : t.knots) j["knots"].push_back({k.t, k.x, k.y});
    out << j.dump() << '\n';
  }
}

LabelFile load_labels(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) data_error("label file is empty (no header)");
  LabelFile labels;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& [n, text] = lines[k];
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      line_error(n, std::string("malformed JSON: ") + e.what());
    }
    if (k == 0) {
      check_header(j, kLabelSchema);
      continue;
    }
    try {
      LabelTrack t;
      t.id = j.at("id").get<int>();
      if (j.contains("class")) t.label = j["class"].get<std::string>();
      if (j.contains("extent")) {
        const auto& e = j["extent"];
        if (e.size() != 3) line_error(n, "extent needs 3 values");
        t.extent = Extent{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
      }
      for (const json& knot : j.at("knots")) {
        if (knot.size() != 3) line_error(n, "knot needs [t, x, y]");
        t.knots.push_back({knot[0].get<double>(), knot[1].get<double>(), knot[2].get<double>()});
      }
      t.validate();
      labels.tracks.push_back(std::move(t));
    } catch (const json::exception& e) {
      line_error(n, e.what());
    } catch (const Error& e) {
      if (std::string(e.what()).rfind("data-io: line", 0) == 0) throw;
      line_error(n, e.what());
    }
  }
  return labels;
}

void save_labels(const LabelFile& labels, const std::filesystem::path& path) {
  auto out = open_out(path);
  save_labels(labels, out);
}

LabelFile load_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_labels(in);
}

std::vector<std::string> label_warnings(const LabelFile& labels) {
  std::vector<std::string> out;
  for (const LabelTrack& t : labels.tracks) {
    const bool moves = std::any_of(t.knots.begin(), t.knots.end(), [&](const LabelKnot& k) {
      return k.x != t.knots.front().x || k.y != t.knots.front().y;
    });
    if (!moves) {
      out.push_back("track " + std::to_string(t.id) +
                    " is stationary; polyline labels assume moving objects");
    }
  }
  return out;
}

std::vector<std::vector<ObjectState>> labels_to_objects(const LabelFile& labels,
                                                        std::span<const double> frame_times,
                                                        const SizePrior& defaults,
                                                        const Extent& fallback) {
  constexpr double kEps = 1e-9;
  std::vector<std::vector<ObjectState>> out(frame_times.size());
  for (const LabelTrack& track : labels.tracks) {
    track.validate();
    const auto& knots = track.knots;
    const std::string label = track.label.value_or("car");
    Extent extent = fallback;
    if (track.extent) {
      extent = *track.extent;
    } else if (const auto it = defaults.find(label); it != defaults.end()) {
      extent = it->second;
    }
    // Heading of each segment; stationary segments borrow the nearest moving one.
    const std::size_t segments = knots.size() - 1;
    std::vector<std::optional<double>> heading(segments);
    for (std::size_t s = 0; s < segments; ++s) {
      const double dx = knots[s + 1].x - knots[s].x;
      const double dy = knots[s + 1].y - knots[s].y;
      if (dx != 0.0 || dy != 0.0) heading[s] = std::atan2(dy, dx);
    }
    for (std::size_t s = 1; s < segments; ++s) {
      if (!heading[s]) heading[s] = heading[s - 1];
    }
    for (std::size_t s = segments - 1; s-- > 0;) {
      if (!heading[s]) heading[s] = heading[s + 1];
    }

    for (std::size_t f = 0; f < frame_times.size(); ++f) {
      const double t = frame_times[f];
      if (t < knots.front().t - kEps || t > knots.back().t + kEps) continue;
      const auto upper = std::upper_bound(
          knots.begin(), knots.end(), t,
          [](double v, const LabelKnot& k) { return v < k.t; });
      std::size_t s = static_cast<std::size_t>(std::distance(knots.begin(), upper));
      s = std::clamp<std::size_t>(s, 1, segments) - 1;
      const LabelKnot& a = knots[s];
      const LabelKnot& b = knots[s + 1];
      const double span = b.t - a.t;
      const double w = (t - a.t) / span;
      ObjectState o;
      o.id = track.id;
      o.t = t;
      o.x = a.x + w * (b.x - a.x);
      o.y = a.y + w * (b.y - a.y);
      o.vx = (b.x - a.x) / span;
      o.vy = (b.y - a.y) / span;
      o.yaw = heading[s].value_or(0.0);
      o.extent = extent;
      o.label = label;
      out[f].push_back(std::move(o));
    }
  }
  for (auto& objs : out) {
    std::sort(objs.begin(), objs.end(),
              [](const ObjectState& a, const ObjectState& b) { return a.id < b.id; });
  }
  return out;
}

LabelFile labels_from_frames(std::span<const Frame> frames, double knot_interval) {
  if (!(knot_interval > 0.0)) {
    throw Error(kModule, ErrorKind::kInvalidArgument, "knot interval must be positive");
  }
  std::map<int, std::vector<const ObjectState*>> sightings;
  for (const Frame& f : frames) {
    for (const ObjectState& o : f.objects) sightings[o.id].push_back(&o);
  }
  LabelFile labels;
  for (const auto& [id, seen] : sightings) {
    if (seen.size() < 2) continue;
    LabelTrack track;
    track.id = id;
    track.label = seen.front()->label;
    track.extent = seen.front()->extent;
    double next = seen.front()->t;
    for (std::size_t k = 0; k < seen.size(); ++k) {
      const ObjectState& o = *seen[k];
      const bool last = k + 1 == seen.size();
      if (o.t >= next - 1e-9 || last) {
        track.knots.push_back({o.t, o.x, o.y});
        next = o.t + knot_interval;
      }
    }
    labels.tracks.push_back(std::move(track));
  }
  return labels;
}

// ------------------------------------------------------------------------- grids

float quantize(float v) { return decode(encode(v)); }

void save_grid(const GridSnapshot& snapshot, std::ostream& out) {
  Writer w(out);
  w.bytes(kGridMagic, 6);
  w.le<std::uint16_t>(kFormatVersion);
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        const std::vector<std::uint8_t>* mask = nullptr;
        std::uint8_t kind = 0;
        if constexpr (std::is_same_v<G, Grid2D>) kind = kKindGrid2D;
        if constexpr (std::is_same_v<G, VisibilityGrid2D>) {
          kind = kKindVisibility;
          mask = &g.fov_mask;
          if (g.fov_mask.size() != g.values.size()) data_error("mask size differs from payload");
        }
        if constexpr (std::is_same_v<G, PolarGrid>) kind = kKindPolar;
        if constexpr (std::is_same_v<G, SphericalGrid>) kind = kKindSpherical;
        if constexpr (std::is_same_v<G, VoxelGrid>) kind = kKindVoxel;
        w.le<std::uint8_t>(kind);
        w.le<std::uint8_t>(mask ? 1 : 0);
        w.f64(snapshot.timestamp);
        write_spec(w, g.spec);
        write_payload(w, g.values, mask);
      },
      snapshot.grid);
  if (!out) data_error("failed to write grid snapshot");
}

GridSnapshot load_grid(std::istream& in) {
  Reader r(in);
  char magic[6];
  r.bytes(magic, 6);
  if (std::memcmp(magic, kGridMagic, 6) != 0) data_error("not a grid snapshot (bad magic)");
  const auto version = r.le<std::uint16_t>();
  if (version != kFormatVersion) {
    data_error("unsupported grid snapshot version " + std::to_string(version) +
               " (expected " + std::to_string(kFormatVersion) + ")");
  }
  const auto kind = r.le<std::uint8_t>();
  const auto flags = r.le<std::uint8_t>();
  GridSnapshot snap;
  snap.timestamp = r.f64();
  const bool has_mask = (flags & 1) != 0;
  if (has_mask != (kind == kKindVisibility)) data_error("mask flag does not match grid kind");
  switch (kind) {
    case kKindGrid2D: {
      Grid2D g;
      g.spec = read_grid2d_spec(r);
      validate_spec(g.spec);
      g.values = read_values(r, g.spec.cell_count());
      snap.grid = std::move(g);
      break;
    }
    case kKindVisibility: {
      VisibilityGrid2D g;
      g.spec = read_grid2d_spec(r);
      validate_spec(g.spec);
      g.values = read_values(r, g.spec.cell_count());
      g.fov_mask.resize(g.values.size());
      r.bytes(g.fov_mask.data(), g.fov_mask.size());
      for (std::uint8_t m : g.fov_mask) {
        if (m > 1) data_error("mask bytes must be 0 or 1");
      }
      g.timestamp = snap.timestamp;
      snap.grid = std::move(g);
      break;
    }
    case kKindPolar: {
      PolarGrid g;
      g.spec = read_polar_spec(r);
      validate_spec(g.spec);
      g.values = read_values(r, g.spec.cell_count());
      snap.grid = std::move(g);
      break;
    }
    case kKindSpherical: {
      SphericalGrid g;
      g.spec = read_spherical_spec(r);
      validate_spec(g.spec);
      g.values = read_values(r, g.spec.cell_count());
      snap.grid = std::move(g);
      break;
    }
    case kKindVoxel: {
      VoxelGrid g;
      g.spec = read_voxel_spec(r);
      validate_spec(g.spec);
      g.values = read_values(r, g.spec.cell_count());
      snap.grid = std::move(g);
      break;
    }
    default:
      data_error("unknown grid kind " + std::to_string(kind));
  }
  return snap;
}

void save_grid(const GridSnapshot& snapshot, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  save_grid(snapshot, out);
}

GridSnapshot load_grid(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  return load_grid(in);
}

void save_grid_series(std::span<const VisibilityGrid2D> grids,
                      const std::filesystem::path& path) {
  auto out = open_out(path, true);
  for (const VisibilityGrid2D& g : grids) save_grid({g, g.timestamp}, out);
}

std::vector<VisibilityGrid2D> load_grid_series(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  Reader probe(in);
  std::vector<VisibilityGrid2D> out;
  while (!probe.at_end()) {
    GridSnapshot s = load_grid(in);
    auto* v = std::get_if<VisibilityGrid2D>(&s.grid);
    if (!v) data_error("grid series must hold visibility grids only");
    out.push_back(std::move(*v));
  }
  return out;
}

// ----------------------------------------------------------------------- reports

nlohmann::json report_to_json(const ReportFile& rf) {
  const MetricsReport& r = rf.report;
  json j = header(kReportSchema);
  j["estimator"] = rf.estimator;
  j["config"] = rf.config;
  j["counts"] = to_json(r.counts);
  j["rates"] = {{"tvr", to_json(r.rates.tvr)},
                {"fvr", to_json(r.rates.fvr)},
                {"fir", to_json(r.rates.fir)},
                {"tir", to_json(r.rates.tir)}};
  j["coverage_rate"] = to_json(r.coverage);
  j["per_object"] = json::array();
  for (const auto& [id, c] : r.per_object) {
    j["per_object"].push_back({{"id", id}, {"counts", to_json(c)}});
  }
  j["per_step"] = json::array();
  for (const StepCounts& s : r.per_step) {
    j["per_step"].push_back({{"t", s.t}, {"counts", to_json(s.counts)}});
  }
  j["events"] = json::array();
  for (const EventRecord& e : r.events) {
    j["events"].push_back({{"t", e.t},
                           {"id", e.object_id},
                           {"class", e.label},
                           {"outcome", std::string(to_string(e.outcome))}});
  }
  return j;
}

ReportFile report_from_json(const nlohmann::json& j) {
  try {
    check_header(j, kReportSchema);
    ReportFile rf;
    rf.estimator = j.at("estimator").get<std::string>();
    rf.config = j.at("config");
    MetricsReport& r = rf.report;
    r.counts = counts_from_json(j.at("counts"));
    const json& rates = j.at("rates");
    r.rates.tvr = ratio_from_json(rates.at("tvr"));
    r.rates.fvr = ratio_from_json(rates.at("fvr"));
    r.rates.fir = ratio_from_json(rates.at("fir"));
    r.rates.tir = ratio_from_json(rates.at("tir"));
    r.coverage = ratio_from_json(j.at("coverage_rate"));
    for (const json& o : j.at("per_object")) {
      r.per_object[o.at("id").get<int>()] = counts_from_json(o.at("counts"));
    }
    for (const json& s : j.at("per_step")) {
      r.per_step.push_back({s.at("t").get<double>(), counts_from_json(s.at("counts"))});
    }
    for (const json& e : j.at("events")) {
      r.events.push_back({e.at("t").get<double>(), e.at("id").get<int>(),
                          e.at("class").get<std::string>(),
                          parse_outcome(e.at("outcome").get<std::string>())});
    }
    if (sensorvis::rates(r.counts) != r.rates) {
      data_error("report rates are inconsistent with its counts");
    }
    return rf;
  } catch (const json::exception& e) {
    data_error(std::string("malformed report: ") + e.what());
  }
}

void save_report(const ReportFile& report, std::ostream& out) {
  out << report_to_json(report).dump(2) << '\n';
}

ReportFile load_report(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    data_error(std::string("malformed report JSON: ") + e.what());
  }
  return report_from_json(j);
}

void save_report(const ReportFile& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  save_report(report, out);
}

ReportFile load_report(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_report(in);
}

}  // namespace sensorvis
