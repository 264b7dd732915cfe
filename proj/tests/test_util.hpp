#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace testutil {

inline toonwarp::Image random_image(std::uint64_t seed, std::size_t h, std::size_t w) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  toonwarp::Image img(h, w);
  for (double& v : img.values()) v = u(rng);
  return img;
}

// Smooth texture: a few low-frequency sinusoids per channel.
inline toonwarp::Image smooth_image(std::uint64_t seed, std::size_t h, std::size_t w) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double fx[3][3], fy[3][3], ph[3][3];
  for (auto* a : {fx, fy, ph}) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a[i][j] = u(rng);
  }
  toonwarp::Image img(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        double v = 0.5;
        for (int k = 0; k < 3; ++k) {
          v += 0.15 * std::sin(0.9 * fx[ch][k] * c + 0.9 * fy[ch][k] * r + 6.28 * ph[ch][k]);
        }
        img.at(r, c, ch) = v;
      }
    }
  }
  return img;
}

template <typename T>
toonwarp::VectorField<T> random_field(std::uint64_t seed, std::size_t rows, std::size_t cols, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  toonwarp::VectorField<T> f(rows, cols);
  for (T& v : f.values()) v = static_cast<T>(u(rng));
  return f;
}

// Keeps a sample position inside the image and at least 2e-2 from the lattice.
inline double probe_position(double pos, double extent) {
  pos = std::clamp(pos, 0.1, extent - 1.1);
  if (std::abs(pos - std::round(pos)) < 2e-2) pos += 0.05;
  return pos;
}

// Central difference of eval() in one float parameter. Returns nullopt when the
// one-sided slopes disagree, which means a kink sits inside the stencil.
template <typename Eval>
std::optional<double> kink_free_slope(float& param, float h, Eval&& eval, double agree = 2e-3) {
  const float orig = param;
  const double f0 = eval();
  param = orig + h;
  const double xp = param, fp = eval();
  param = orig - h;
  const double xm = param, fm = eval();
  param = orig;
  const double fwd = (fp - f0) / (xp - orig), bwd = (f0 - fm) / (orig - xm);
  if (std::abs(fwd - bwd) > agree * std::max({std::abs(fwd), std::abs(bwd), 1e-6})) return std::nullopt;
  return (fp - fm) / (xp - xm);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("toonwarp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
