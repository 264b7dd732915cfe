#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "toonwarp/dataset.hpp"
#include "toonwarp/error.hpp"
#include "toonwarp/png_io.hpp"
#include "toonwarp/warp.hpp"

namespace toonwarp {

FieldStyle parse_field_style(std::string_view name) {
  if (name == "smooth-random") return FieldStyle::SmoothRandom;
  if (name == "bulge") return FieldStyle::Bulge;
  if (name == "translation") return FieldStyle::Translation;
  throw Error(ErrorCode::InvalidArgument,
              "unknown field style '" + std::string(name) + "' (expected smooth-random, bulge or translation)");
}

std::string_view field_style_name(FieldStyle style) {
  switch (style) {
    case FieldStyle::SmoothRandom:
      return "smooth-random";
    case FieldStyle::Bulge:
      return "bulge";
    case FieldStyle::Translation:
      return "translation";
  }
  return "unknown";
}

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// C1 value noise: random lattice values every `period` pixels, smoothstep blend.
class ValueNoise {
 public:
  ValueNoise(std::mt19937_64& rng, std::size_t size, double period)
      : period_(period), cells_(static_cast<std::size_t>(std::ceil(size / period)) + 2), values_(cells_ * cells_) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : values_) v = dist(rng);
  }

  double at(double x, double y) const {
    const double gx = x / period_;
    const double gy = y / period_;
    const auto x0 = static_cast<std::size_t>(gx);
    const auto y0 = static_cast<std::size_t>(gy);
    const double tx = smoothstep(gx - x0);
    const double ty = smoothstep(gy - y0);
    const double top = (1 - tx) * lattice(y0, x0) + tx * lattice(y0, x0 + 1);
    const double bot = (1 - tx) * lattice(y0 + 1, x0) + tx * lattice(y0 + 1, x0 + 1);
    return (1 - ty) * top + ty * bot;
  }

 private:
  double lattice(std::size_t r, std::size_t c) const { return values_[r * cells_ + c]; }

  double period_;
  std::size_t cells_;
  std::vector<double> values_;
};

// Soft inside-ness of an axis-aligned ellipse, 1 inside, 0 outside.
double ellipse_mask(double x, double y, double cx, double cy, double rx, double ry, double softness) {
  const double d = std::hypot((x - cx) / rx, (y - cy) / ry);
  return std::clamp((1.0 - d) / softness + 0.5, 0.0, 1.0);
}

std::seed_seq sample_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(stream)};
}

}  // namespace

Image synth_texture(std::uint64_t seed, std::size_t size, double skin_texture) {
  auto seq = sample_seed(seed, 0, 1);
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s = static_cast<double>(size);
  const double scale = s / 256.0;

  const Rgb skin{0.55 + 0.35 * u(rng), 0.35 + 0.3 * u(rng), 0.25 + 0.3 * u(rng)};
  const Rgb background{0.15 + 0.7 * u(rng), 0.15 + 0.7 * u(rng), 0.15 + 0.7 * u(rng)};
  const double cx = s * (0.5 + 0.04 * (u(rng) - 0.5));
  const double cy = s * (0.5 + 0.04 * (u(rng) - 0.5));
  const double rx = s * (0.27 + 0.06 * u(rng));
  const double ry = s * (0.34 + 0.06 * u(rng));

  const ValueNoise coarse(rng, size, 32.0 * scale);
  const ValueNoise mid(rng, size, 16.0 * scale);
  const ValueNoise fine(rng, size, 8.0 * scale);
  const ValueNoise tint_r(rng, size, 24.0 * scale);
  const ValueNoise tint_b(rng, size, 24.0 * scale);

  Image image(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double x = static_cast<double>(c);
      const double y = static_cast<double>(r);
      const double face = ellipse_mask(x, y, cx, cy, rx, ry, 0.08);
      const double eyes = std::max(ellipse_mask(x, y, cx - 0.38 * rx, cy - 0.2 * ry, 0.2 * rx, 0.1 * ry, 0.4),
                                   ellipse_mask(x, y, cx + 0.38 * rx, cy - 0.2 * ry, 0.2 * rx, 0.1 * ry, 0.4));
      const double mouth = ellipse_mask(x, y, cx, cy + 0.5 * ry, 0.4 * rx, 0.08 * ry, 0.4);
      const double n = 0.5 * coarse.at(x, y) + 0.3 * mid.at(x, y) + 0.2 * fine.at(x, y);
      const double detail = 1.0 - face * (1.0 - skin_texture);
      const double shade = 1.0 + 0.7 * n * detail;
      for (std::size_t ch = 0; ch < 3; ++ch) {
        double v = (1.0 - face) * background[ch] + face * skin[ch];
        v *= (1.0 - 0.6 * eyes) * (1.0 - 0.4 * mouth);
        v *= shade;
        if (ch == 0) v += 0.15 * detail * tint_r.at(x, y);
        if (ch == 2) v += 0.15 * detail * tint_b.at(x, y);
        image.at(r, c, ch) = quantize_8bit(v);
      }
    }
  }
  return image;
}

CoarseField translation_field(std::size_t grid, double dx, double dy) {
  CoarseField f = zero_field(grid, grid);
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t c = 0; c < grid; ++c) {
      f.dx(r, c) = static_cast<float>(dx);
      f.dy(r, c) = static_cast<float>(dy);
    }
  }
  return f;
}

CoarseField bulge_field(std::size_t grid, std::size_t dense_size, double peak) {
  // Backward mapping: vectors point toward the center, magnifying it.
  // Profile rho * exp(-rho^2) peaks at rho = 1/sqrt(2) with value exp(-1/2)/sqrt(2).
  CoarseField f = zero_field(grid, grid);
  const double step = static_cast<double>(dense_size - 1) / static_cast<double>(grid - 1);
  const double half = static_cast<double>(grid - 1) / 2.0;
  const double radius = 0.35 * static_cast<double>(dense_size);
  const double gain = peak / (std::exp(-0.5) / std::sqrt(2.0));
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t c = 0; c < grid; ++c) {
      const double ux = (static_cast<double>(c) - half) * step / radius;
      const double uy = (static_cast<double>(r) - half) * step / radius;
      const double k = -gain * std::exp(-(ux * ux + uy * uy));
      f.dx(r, c) = static_cast<float>(k * ux);
      f.dy(r, c) = static_cast<float>(k * uy);
    }
  }
  return f;
}

CoarseField smooth_random_field(std::uint64_t seed, std::size_t grid, double max_component) {
  auto seq = sample_seed(seed, 0, 2);
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double g = static_cast<double>(grid);

  struct Bump {
    double cx, cy, sigma, ax, ay;
  };
  std::vector<Bump> bumps(4);
  for (Bump& b : bumps) {
    b = {g * u(rng), g * u(rng), g * (0.15 + 0.15 * u(rng)), 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
  }
  VectorField<double> raw(grid, grid);
  double peak = 0.0;
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t c = 0; c < grid; ++c) {
      for (const Bump& b : bumps) {
        const double d2 = (c - b.cx) * (c - b.cx) + (r - b.cy) * (r - b.cy);
        const double w = std::exp(-d2 / (2.0 * b.sigma * b.sigma));
        raw.dx(r, c) += b.ax * w;
        raw.dy(r, c) += b.ay * w;
      }
      peak = std::max({peak, std::abs(raw.dx(r, c)), std::abs(raw.dy(r, c))});
    }
  }
  const double target = max_component * (0.6 + 0.4 * u(rng));
  CoarseField f = zero_field(grid, grid);
  const double gain = peak > 0.0 ? target / peak : 0.0;
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    f.values()[i] = static_cast<float>(std::clamp(raw.values()[i] * gain, -max_component, max_component));
  }
  return f;
}

std::vector<PairedSample> synth_dataset(std::uint64_t seed, std::size_t n, FieldStyle style, const SynthConfig& cfg) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs n >= 1");
  if (cfg.grid < 2 || cfg.size < cfg.grid) throw Error(ErrorCode::InvalidDimension, "bad synthetic grid/size");
  if (!(cfg.skin_texture >= 0.0 && cfg.skin_texture <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "skin texture must lie in [0, 1]");
  }
  if (!std::isfinite(cfg.magnitude) || cfg.magnitude < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic magnitude must be finite and non-negative");
  }
  std::vector<PairedSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto seq = sample_seed(seed, i, 0);
    std::mt19937_64 rng(seq);
    const std::uint64_t texture_seed = rng();
    const std::uint64_t field_seed = rng();
    std::uniform_real_distribution<double> u(0.5, 1.0);

    PairedSample s;
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%03zu", i);
    s.id = id;
    s.x_in = synth_texture(texture_seed, cfg.size, cfg.skin_texture);
    switch (style) {
      case FieldStyle::Translation:
        s.field = translation_field(cfg.grid, cfg.magnitude, 0.0);
        break;
      case FieldStyle::Bulge:
        s.field = bulge_field(cfg.grid, cfg.size, cfg.magnitude * u(rng));
        break;
      case FieldStyle::SmoothRandom:
        s.field = smooth_random_field(field_seed, cfg.grid, cfg.magnitude);
        break;
    }
    s.x_toon = warp(s.x_in, upsample(*s.field, cfg.size, cfg.size));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace toonwarp
