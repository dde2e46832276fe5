#ifndef SENSORVIS_HARNESS_RENDER_HPP_
#define SENSORVIS_HARNESS_RENDER_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sensorvis/grid.hpp"
#include "sensorvis/object.hpp"
#include "sensorvis/sensor_models.hpp"

namespace sensorvis::harness {

using Rgb = std::array<std::uint8_t, 3>;

// Palette: invisible (0) blue, unknown (0.5) white, visible (1) red, linear in
// between; cells outside the field of view gray; object outlines black;
// measurements green.
inline constexpr Rgb kInvisible{0, 0, 255};
inline constexpr Rgb kUnknownColor{255, 255, 255};
inline constexpr Rgb kVisible{255, 0, 0};
inline constexpr Rgb kOutsideFov{160, 160, 160};
inline constexpr Rgb kObject{0, 0, 0};
inline constexpr Rgb kMeasurement{0, 170, 0};

Rgb visibility_color(float v);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major, row 0 at the top

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// One grid cell becomes scale x scale pixels; +x points right and +y up.
Image render_visibility(const VisibilityGrid2D& vis, std::span<const ObjectState> objects,
                        std::span<const Measurement> measurements, const SensorPose& sensor,
                        int scale = 4);

// Binary PPM (P6).
void write_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace sensorvis::harness

#endif  // SENSORVIS_HARNESS_RENDER_HPP_
