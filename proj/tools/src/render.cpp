#include "sensorvis_harness/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sensorvis/error.hpp"

namespace sensorvis::harness {
namespace {

std::uint8_t mix(std::uint8_t a, std::uint8_t b, double w) {
  return static_cast<std::uint8_t>(std::lround(a + w * (static_cast<int>(b) - a)));
}

Rgb blend(const Rgb& a, const Rgb& b, double w) {
  return {mix(a[0], b[0], w), mix(a[1], b[1], w), mix(a[2], b[2], w)};
}

}  // namespace

Rgb visibility_color(float v) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  if (c <= 0.5) return blend(kInvisible, kUnknownColor, c / 0.5);
  return blend(kUnknownColor, kVisible, (c - 0.5) / 0.5);
}

Image render_visibility(const VisibilityGrid2D& vis, std::span<const ObjectState> objects,
                        std::span<const Measurement> measurements, const SensorPose& sensor,
                        int scale) {
  const GridSpec2D& s = vis.spec;
  Image img;
  img.width = s.width * scale;
  img.height = s.height * scale;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, kOutsideFov);
  for (int j = 0; j < s.height; ++j) {
    for (int i = 0; i < s.width; ++i) {
      const CellIndex c{i, j};
      const Rgb color = vis.in_fov(c) ? visibility_color(vis.at(c)) : kOutsideFov;
      for (int dy = 0; dy < scale; ++dy) {
        for (int dx = 0; dx < scale; ++dx) {
          img.at(i * scale + dx, (s.height - 1 - j) * scale + (scale - 1 - dy)) = color;
        }
      }
    }
  }
  const double px_per_m = scale / s.resolution;
  auto plot = [&](const Vec2& p, const Rgb& color) {
    const int x = static_cast<int>(std::floor((p.x() - s.origin_x) * px_per_m));
    const int y = img.height - 1 - static_cast<int>(std::floor((p.y() - s.origin_y) * px_per_m));
    if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.at(x, y) = color;
  };
  for (const ObjectState& o : objects) {
    const auto corners = o.footprint().corners();
    for (std::size_t k = 0; k < corners.size(); ++k) {
      const Vec2 a = corners[k];
      const Vec2 b = corners[(k + 1) % corners.size()];
      const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() * px_per_m * 2)));
      for (int n = 0; n <= steps; ++n) plot(a + (b - a) * (static_cast<double>(n) / steps), kObject);
    }
  }
  for (const Measurement& m : measurements) {
    const Vec3 p = world_position(m, sensor);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        plot(p.head<2>() + Vec2(dx, dy) / px_per_m, kMeasurement);
      }
    }
  }
  return img;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cli-harness", ErrorKind::kData, "cannot open '" + path.string() + "' for writing");
  }
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (const Rgb& p : image.pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
}

}  // namespace sensorvis::harness
