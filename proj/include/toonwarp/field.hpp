#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "toonwarp/error.hpp"

namespace toonwarp {

/// Grid of (dx, dy) displacement vectors in pixels of the full-resolution
/// image. x grows rightward with the column index, y downward with the row.
/// Storage is row-major with dx and dy interleaved per cell.
template <typename T>
class VectorField {
 public:
  using value_type = T;

  VectorField() = default;
  VectorField(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols * 2, T{0}) {
    if (rows == 0 || cols == 0) {
      throw Error(ErrorCode::InvalidDimension, "field dimensions must be at least 1x1");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t cells() const noexcept { return rows_ * cols_; }

  T& dx(std::size_t r, std::size_t c) { return data_[(r * cols_ + c) * 2]; }
  T& dy(std::size_t r, std::size_t c) { return data_[(r * cols_ + c) * 2 + 1]; }
  T dx(std::size_t r, std::size_t c) const { return data_[(r * cols_ + c) * 2]; }
  T dy(std::size_t r, std::size_t c) const { return data_[(r * cols_ + c) * 2 + 1]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const VectorField& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    for (T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Coarse fields are the learnable / persisted quantity and live in single
/// precision, matching the ATF1 payload. Dense fields and every gradient are
/// double.
using CoarseField = VectorField<float>;
using DenseField = VectorField<double>;
using CoarseGradient = VectorField<double>;

inline constexpr std::size_t kCoarseSize = 32;
inline constexpr std::size_t kDefaultDenseSize = 256;

CoarseField zero_field(std::size_t rows, std::size_t cols);

/// Align-corners bilinear upsampling. Displacements are carried over
/// unchanged; they are already in output pixel units.
DenseField upsample(const CoarseField& field, std::size_t out_rows, std::size_t out_cols);
DenseField upsample(const VectorField<double>& field, std::size_t out_rows, std::size_t out_cols);

/// Adjoint of upsample: pulls a dense gradient back onto the coarse grid.
CoarseGradient upsample_adjoint(const DenseField& dense_grad, std::size_t coarse_rows, std::size_t coarse_cols);

template <typename T>
VectorField<T> scale_field(const VectorField<T>& field, double alpha) {
  if (!std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "scaling factor must be finite");
  }
  VectorField<T> out = field;
  for (T& v : out.values()) v = static_cast<T>(static_cast<double>(v) * alpha);
  return out;
}

/// Mirror columns and negate dx so the field stays consistent with hflip(image).
template <typename T>
VectorField<T> hflip_field(const VectorField<T>& field) {
  VectorField<T> out(field.rows(), field.cols());
  const std::size_t w = field.cols();
  for (std::size_t r = 0; r < field.rows(); ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      out.dx(r, w - 1 - c) = -field.dx(r, c);
      out.dy(r, w - 1 - c) = field.dy(r, c);
    }
  }
  return out;
}

/// Sum of |dx| + |dy| over all cells.
template <typename T>
double l1_norm(const VectorField<T>& field) {
  double s = 0.0;
  for (T v : field.values()) s += std::abs(static_cast<double>(v));
  return s;
}

/// Mean per-cell Euclidean displacement length.
template <typename T>
double mean_magnitude(const VectorField<T>& field) {
  double s = 0.0;
  for (std::size_t r = 0; r < field.rows(); ++r) {
    for (std::size_t c = 0; c < field.cols(); ++c) s += std::hypot(double(field.dx(r, c)), double(field.dy(r, c)));
  }
  return s / static_cast<double>(field.cells());
}

}  // namespace toonwarp
