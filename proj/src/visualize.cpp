#include "toonwarp/visualize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace toonwarp {

namespace {

// Middlebury wheel; segment lengths follow perceptual spacing between hues.
constexpr int kRY = 15, kYG = 6, kGC = 4, kCB = 11, kBM = 13, kMR = 6;
constexpr int kWheelSize = kRY + kYG + kGC + kCB + kBM + kMR;

const std::array<Rgb, kWheelSize>& wheel() {
  static const std::array<Rgb, kWheelSize> colors = [] {
    std::array<Rgb, kWheelSize> w{};
    int k = 0;
    for (int i = 0; i < kRY; ++i) w[k++] = {1.0, double(i) / kRY, 0.0};
    for (int i = 0; i < kYG; ++i) w[k++] = {1.0 - double(i) / kYG, 1.0, 0.0};
    for (int i = 0; i < kGC; ++i) w[k++] = {0.0, 1.0, double(i) / kGC};
    for (int i = 0; i < kCB; ++i) w[k++] = {0.0, 1.0 - double(i) / kCB, 1.0};
    for (int i = 0; i < kBM; ++i) w[k++] = {double(i) / kBM, 0.0, 1.0};
    for (int i = 0; i < kMR; ++i) w[k++] = {1.0, 0.0, 1.0 - double(i) / kMR};
    return w;
  }();
  return colors;
}

}  // namespace

Rgb flow_color(double u, double v) {
  const double rad = std::min(1.0, std::hypot(u, v));
  const double angle = std::atan2(-v, -u) / std::numbers::pi;
  const double fk = (angle + 1.0) / 2.0 * (kWheelSize - 1);
  const int k0 = std::clamp(static_cast<int>(fk), 0, kWheelSize - 1);
  const int k1 = (k0 + 1) % kWheelSize;
  const double f = fk - k0;
  Rgb out{};
  for (int ch = 0; ch < 3; ++ch) {
    const double col = (1.0 - f) * wheel()[k0][ch] + f * wheel()[k1][ch];
    out[ch] = 1.0 - rad * (1.0 - col);
  }
  return out;
}

Image visualize_field(const DenseField& field) {
  double max_rad = 0.0;
  for (std::size_t r = 0; r < field.rows(); ++r) {
    for (std::size_t c = 0; c < field.cols(); ++c) max_rad = std::max(max_rad, std::hypot(field.dx(r, c), field.dy(r, c)));
  }
  Image out(field.rows(), field.cols(), 1.0);
  if (max_rad == 0.0) return out;
  for (std::size_t r = 0; r < field.rows(); ++r) {
    for (std::size_t c = 0; c < field.cols(); ++c) {
      out.set_pixel(r, c, flow_color(field.dx(r, c) / max_rad, field.dy(r, c) / max_rad));
    }
  }
  return out;
}

}  // namespace toonwarp
