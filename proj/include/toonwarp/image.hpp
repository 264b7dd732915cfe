#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace toonwarp {

using Rgb = std::array<double, 3>;

/// H x W x 3 RGB image, row-major with interleaved channels, nominal range [0, 1].
class Image {
 public:
  static constexpr std::size_t kChannels = 3;

  Image() = default;
  Image(std::size_t height, std::size_t width, double fill = 0.0);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(std::size_t row, std::size_t col, std::size_t ch) {
    return data_[(row * width_ + col) * kChannels + ch];
  }
  double at(std::size_t row, std::size_t col, std::size_t ch) const {
    return data_[(row * width_ + col) * kChannels + ch];
  }

  Rgb pixel(std::size_t row, std::size_t col) const {
    const double* p = &data_[(row * width_ + col) * kChannels];
    return {p[0], p[1], p[2]};
  }
  void set_pixel(std::size_t row, std::size_t col, const Rgb& v) {
    double* p = &data_[(row * width_ + col) * kChannels];
    p[0] = v[0];
    p[1] = v[1];
    p[2] = v[2];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// Mirror columns.
Image hflip(const Image& image);

/// Bilinear resize with align-corners sampling; identity when the size already matches.
Image resize_bilinear(const Image& image, std::size_t out_height, std::size_t out_width);

/// Clamp every value into [0, 1].
void clamp_unit(Image& image);

/// Sum of absolute differences divided by the element count.
double mean_abs_diff(const Image& a, const Image& b);

/// Horizontal concatenation; all parts must share a height.
Image hconcat(std::span<const Image> parts);

}  // namespace toonwarp
