#include "toonwarp/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toonwarp/error.hpp"

namespace toonwarp {

Image::Image(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width * kChannels, fill) {
  if (height == 0 || width == 0) {
    throw Error(ErrorCode::InvalidDimension, "image dimensions must be at least 1x1");
  }
}

Image hflip(const Image& image) {
  Image out(image.height(), image.width());
  const std::size_t w = image.width();
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < w; ++c) out.set_pixel(r, w - 1 - c, image.pixel(r, c));
  }
  return out;
}

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

std::vector<Tap> align_corner_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double pos =
        out == 1 ? 0.0 : static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    lo = std::min(lo, in - 1);
    const std::size_t hi = std::min(lo + 1, in - 1);
    taps[i] = {lo, hi, pos - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace

Image resize_bilinear(const Image& image, std::size_t out_height, std::size_t out_width) {
  if (image.height() == out_height && image.width() == out_width) return image;
  Image out(out_height, out_width);
  const auto rows = align_corner_taps(image.height(), out_height);
  const auto cols = align_corner_taps(image.width(), out_width);
  for (std::size_t r = 0; r < out_height; ++r) {
    const Tap& ty = rows[r];
    for (std::size_t c = 0; c < out_width; ++c) {
      const Tap& tx = cols[c];
      for (std::size_t ch = 0; ch < Image::kChannels; ++ch) {
        const double top = (1.0 - tx.frac) * image.at(ty.lo, tx.lo, ch) + tx.frac * image.at(ty.lo, tx.hi, ch);
        const double bot = (1.0 - tx.frac) * image.at(ty.hi, tx.lo, ch) + tx.frac * image.at(ty.hi, tx.hi, ch);
        out.at(r, c, ch) = (1.0 - ty.frac) * top + ty.frac * bot;
      }
    }
  }
  return out;
}

void clamp_unit(Image& image) {
  for (double& v : image.values()) v = std::clamp(v, 0.0, 1.0);
}

double mean_abs_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::InvalidArgument, "image shapes differ");
  }
  const auto av = a.values();
  const auto bv = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) sum += std::abs(av[i] - bv[i]);
  return sum / static_cast<double>(av.size());
}

Image hconcat(std::span<const Image> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to concatenate");
  std::size_t width = 0;
  for (const Image& p : parts) {
    if (p.height() != parts.front().height()) {
      throw Error(ErrorCode::InvalidArgument, "panel heights differ");
    }
    width += p.width();
  }
  Image out(parts.front().height(), width);
  std::size_t offset = 0;
  for (const Image& p : parts) {
    for (std::size_t r = 0; r < p.height(); ++r) {
      for (std::size_t c = 0; c < p.width(); ++c) out.set_pixel(r, offset + c, p.pixel(r, c));
    }
    offset += p.width();
  }
  return out;
}

}  // namespace toonwarp
