#include "toonwarp/warp.hpp"

#include <cmath>
#include <string>

#include "toonwarp/parallel.hpp"

namespace toonwarp {

namespace {

struct AxisTap {
  std::size_t lo;
  std::size_t hi;
  double frac;
  bool clamped;
};

AxisTap axis_tap(double pos, std::size_t extent) {
  const double max_pos = static_cast<double>(extent - 1);
  AxisTap t{0, 0, 0.0, false};
  if (pos < 0.0) {
    pos = 0.0;
    t.clamped = true;
  } else if (pos > max_pos) {
    pos = max_pos;
    t.clamped = true;
  }
  if (extent == 1) return t;
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo >= extent - 1) lo = extent - 2;
  t.lo = lo;
  t.hi = lo + 1;
  t.frac = pos - static_cast<double>(lo);
  return t;
}

struct Footprint {
  AxisTap x;
  AxisTap y;
};

Footprint footprint(const Image& image, double x, double y) {
  return {axis_tap(x, image.width()), axis_tap(y, image.height())};
}

double blend(const Image& image, const Footprint& f, std::size_t ch) {
  const double top = (1.0 - f.x.frac) * image.at(f.y.lo, f.x.lo, ch) + f.x.frac * image.at(f.y.lo, f.x.hi, ch);
  const double bot = (1.0 - f.x.frac) * image.at(f.y.hi, f.x.lo, ch) + f.x.frac * image.at(f.y.hi, f.x.hi, ch);
  return (1.0 - f.y.frac) * top + f.y.frac * bot;
}

void check_shapes(const Image& image, const DenseField& field) {
  if (image.height() != field.rows() || image.width() != field.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "field " + std::to_string(field.rows()) + "x" + std::to_string(field.cols()) +
                    " does not match image " + std::to_string(image.height()) + "x" + std::to_string(image.width()));
  }
}

void check_upstream(const Image& image, const Image& upstream) {
  if (!image.same_shape(upstream)) {
    throw Error(ErrorCode::InvalidArgument, "upstream gradient shape does not match the warp output");
  }
}

Footprint pixel_footprint(const Image& image, const DenseField& field, std::size_t r, std::size_t c) {
  return footprint(image, static_cast<double>(c) + field.dx(r, c), static_cast<double>(r) + field.dy(r, c));
}

}  // namespace

Rgb sample_bilinear(const Image& image, double x, double y) {
  const Footprint f = footprint(image, x, y);
  return {blend(image, f, 0), blend(image, f, 1), blend(image, f, 2)};
}

Image warp(const Image& image, const DenseField& field) {
  check_shapes(image, field);
  Image out(image.height(), image.width());
  parallel_for(image.height(), [&](std::size_t r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      const Footprint f = pixel_footprint(image, field, r, c);
      for (std::size_t ch = 0; ch < Image::kChannels; ++ch) out.at(r, c, ch) = blend(image, f, ch);
    }
  });
  return out;
}

DenseField warp_field_gradient(const Image& image, const DenseField& field, const Image& upstream) {
  check_shapes(image, field);
  check_upstream(image, upstream);
  DenseField grad(field.rows(), field.cols());
  parallel_for(image.height(), [&](std::size_t r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      const Footprint f = pixel_footprint(image, field, r, c);
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t ch = 0; ch < Image::kChannels; ++ch) {
        const double up = upstream.at(r, c, ch);
        if (up == 0.0) continue;
        const double i00 = image.at(f.y.lo, f.x.lo, ch);
        const double i01 = image.at(f.y.lo, f.x.hi, ch);
        const double i10 = image.at(f.y.hi, f.x.lo, ch);
        const double i11 = image.at(f.y.hi, f.x.hi, ch);
        if (!f.x.clamped) gx += up * ((1.0 - f.y.frac) * (i01 - i00) + f.y.frac * (i11 - i10));
        if (!f.y.clamped) gy += up * ((1.0 - f.x.frac) * (i10 - i00) + f.x.frac * (i11 - i01));
      }
      grad.dx(r, c) = gx;
      grad.dy(r, c) = gy;
    }
  });
  return grad;
}

WarpGradients warp_backward(const Image& image, const DenseField& field, const Image& upstream) {
  WarpGradients out{Image(image.height(), image.width()), warp_field_gradient(image, field, upstream)};
  // Scatter stays sequential so accumulation order is fixed.
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      const Footprint f = pixel_footprint(image, field, r, c);
      const double w00 = (1.0 - f.y.frac) * (1.0 - f.x.frac);
      const double w01 = (1.0 - f.y.frac) * f.x.frac;
      const double w10 = f.y.frac * (1.0 - f.x.frac);
      const double w11 = f.y.frac * f.x.frac;
      for (std::size_t ch = 0; ch < Image::kChannels; ++ch) {
        const double up = upstream.at(r, c, ch);
        out.d_image.at(f.y.lo, f.x.lo, ch) += w00 * up;
        out.d_image.at(f.y.lo, f.x.hi, ch) += w01 * up;
        out.d_image.at(f.y.hi, f.x.lo, ch) += w10 * up;
        out.d_image.at(f.y.hi, f.x.hi, ch) += w11 * up;
      }
    }
  }
  return out;
}

}  // namespace toonwarp
