#include "toonwarp/augment.hpp"

#include <algorithm>
#include <cmath>

namespace toonwarp {

namespace {

double luminance(const Rgb& p) { return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]; }

Rgb rgb_to_hsv(const Rgb& p) {
  const double mx = std::max({p[0], p[1], p[2]});
  const double mn = std::min({p[0], p[1], p[2]});
  const double delta = mx - mn;
  double h = 0.0;
  if (delta > 0.0) {
    if (mx == p[0]) {
      h = std::fmod((p[1] - p[2]) / delta, 6.0);
    } else if (mx == p[1]) {
      h = (p[2] - p[0]) / delta + 2.0;
    } else {
      h = (p[0] - p[1]) / delta + 4.0;
    }
    h /= 6.0;
    if (h < 0.0) h += 1.0;
  }
  const double s = mx > 0.0 ? delta / mx : 0.0;
  return {h, s, mx};
}

Rgb hsv_to_rgb(const Rgb& hsv) {
  const double h = hsv[0] * 6.0;
  const double s = hsv[1];
  const double v = hsv[2];
  const int sector = static_cast<int>(std::floor(h)) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0:
      return {v, t, p};
    case 1:
      return {q, v, p};
    case 2:
      return {p, v, t};
    case 3:
      return {p, q, v};
    case 4:
      return {t, p, v};
    default:
      return {v, p, q};
  }
}

}  // namespace

Image color_jitter(const Image& image, const JitterParams& params) {
  Image out = image;
  if (params.brightness != 1.0) {
    for (double& v : out.values()) v *= params.brightness;
    clamp_unit(out);
  }
  if (params.contrast != 1.0) {
    double mean = 0.0;
    for (std::size_t r = 0; r < out.height(); ++r) {
      for (std::size_t c = 0; c < out.width(); ++c) mean += luminance(out.pixel(r, c));
    }
    mean /= static_cast<double>(out.height() * out.width());
    for (double& v : out.values()) v = params.contrast * v + (1.0 - params.contrast) * mean;
    clamp_unit(out);
  }
  if (params.saturation != 1.0) {
    for (std::size_t r = 0; r < out.height(); ++r) {
      for (std::size_t c = 0; c < out.width(); ++c) {
        Rgb p = out.pixel(r, c);
        const double l = luminance(p);
        for (double& v : p) v = std::clamp(params.saturation * v + (1.0 - params.saturation) * l, 0.0, 1.0);
        out.set_pixel(r, c, p);
      }
    }
  }
  if (params.hue != 0.0) {
    for (std::size_t r = 0; r < out.height(); ++r) {
      for (std::size_t c = 0; c < out.width(); ++c) {
        Rgb hsv = rgb_to_hsv(out.pixel(r, c));
        hsv[0] = hsv[0] + params.hue;
        hsv[0] -= std::floor(hsv[0]);
        Rgb p = hsv_to_rgb(hsv);
        for (double& v : p) v = std::clamp(v, 0.0, 1.0);
        out.set_pixel(r, c, p);
      }
    }
  }
  return out;
}

JitterParams sample_jitter(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> factor(0.9, 1.1);
  std::uniform_real_distribution<double> hue(-0.05, 0.05);
  JitterParams p;
  p.brightness = factor(rng);
  p.contrast = factor(rng);
  p.saturation = factor(rng);
  p.hue = hue(rng);
  return p;
}

PairedSample augment_pair(const PairedSample& sample, bool flip, const JitterParams& jitter) {
  PairedSample out = sample;
  if (flip) {
    out.x_in = hflip(sample.x_in);
    out.x_toon = hflip(sample.x_toon);
    if (sample.field) out.field = hflip_field(*sample.field);
  }
  out.x_in = color_jitter(out.x_in, jitter);
  out.x_toon = color_jitter(out.x_toon, jitter);
  return out;
}

PairedSample augment_pair(const PairedSample& sample, std::mt19937_64& rng, const AugmentOptions& options) {
  std::bernoulli_distribution coin(0.5);
  // Draw both regardless of the toggles so the random stream does not depend on them.
  const bool flip = coin(rng);
  const JitterParams jitter = sample_jitter(rng);
  return augment_pair(sample, options.flip && flip, options.jitter ? jitter : JitterParams{});
}

}  // namespace toonwarp
