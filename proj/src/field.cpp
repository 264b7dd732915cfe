#include "toonwarp/field.hpp"

#include <algorithm>
#include <string>

namespace toonwarp {

CoarseField zero_field(std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2) {
    throw Error(ErrorCode::InvalidDimension,
                "coarse field must be at least 2x2, got " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  return CoarseField(rows, cols);
}

namespace {

// Dense index i lands on coarse coordinate i * (n_in - 1) / (n_out - 1).
struct Tap {
  std::size_t lo;
  double frac;
};

std::vector<Tap> taps_for(std::size_t n_in, std::size_t n_out) {
  std::vector<Tap> taps(n_out);
  const double step = static_cast<double>(n_in - 1) / static_cast<double>(n_out - 1);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * step;
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= n_in - 1) lo = n_in - 2;
    taps[i] = {lo, pos - static_cast<double>(lo)};
  }
  return taps;
}

void check_upsample_dims(std::size_t rows, std::size_t cols, std::size_t out_rows, std::size_t out_cols) {
  if (rows < 2 || cols < 2) {
    throw Error(ErrorCode::InvalidDimension, "coarse field must be at least 2x2 to upsample");
  }
  if (out_rows < rows || out_cols < cols) {
    throw Error(ErrorCode::InvalidDimension, "upsample target " + std::to_string(out_rows) + "x" +
                                                 std::to_string(out_cols) + " is smaller than the field " +
                                                 std::to_string(rows) + "x" + std::to_string(cols));
  }
}

template <typename T>
DenseField upsample_impl(const VectorField<T>& field, std::size_t out_rows, std::size_t out_cols) {
  check_upsample_dims(field.rows(), field.cols(), out_rows, out_cols);
  const auto ty = taps_for(field.rows(), out_rows);
  const auto tx = taps_for(field.cols(), out_cols);
  DenseField out(out_rows, out_cols);
  for (std::size_t r = 0; r < out_rows; ++r) {
    const std::size_t r0 = ty[r].lo;
    const double fy = ty[r].frac;
    for (std::size_t c = 0; c < out_cols; ++c) {
      const std::size_t c0 = tx[c].lo;
      const double fx = tx[c].frac;
      const double w00 = (1.0 - fy) * (1.0 - fx);
      const double w01 = (1.0 - fy) * fx;
      const double w10 = fy * (1.0 - fx);
      const double w11 = fy * fx;
      out.dx(r, c) = w00 * field.dx(r0, c0) + w01 * field.dx(r0, c0 + 1) + w10 * field.dx(r0 + 1, c0) +
                     w11 * field.dx(r0 + 1, c0 + 1);
      out.dy(r, c) = w00 * field.dy(r0, c0) + w01 * field.dy(r0, c0 + 1) + w10 * field.dy(r0 + 1, c0) +
                     w11 * field.dy(r0 + 1, c0 + 1);
    }
  }
  return out;
}

}  // namespace

DenseField upsample(const CoarseField& field, std::size_t out_rows, std::size_t out_cols) {
  return upsample_impl(field, out_rows, out_cols);
}

DenseField upsample(const VectorField<double>& field, std::size_t out_rows, std::size_t out_cols) {
  return upsample_impl(field, out_rows, out_cols);
}

CoarseGradient upsample_adjoint(const DenseField& dense_grad, std::size_t coarse_rows, std::size_t coarse_cols) {
  check_upsample_dims(coarse_rows, coarse_cols, dense_grad.rows(), dense_grad.cols());
  const auto ty = taps_for(coarse_rows, dense_grad.rows());
  const auto tx = taps_for(coarse_cols, dense_grad.cols());
  CoarseGradient out(coarse_rows, coarse_cols);
  for (std::size_t r = 0; r < dense_grad.rows(); ++r) {
    const std::size_t r0 = ty[r].lo;
    const double fy = ty[r].frac;
    for (std::size_t c = 0; c < dense_grad.cols(); ++c) {
      const std::size_t c0 = tx[c].lo;
      const double fx = tx[c].frac;
      const double gx = dense_grad.dx(r, c);
      const double gy = dense_grad.dy(r, c);
      const double w00 = (1.0 - fy) * (1.0 - fx);
      const double w01 = (1.0 - fy) * fx;
      const double w10 = fy * (1.0 - fx);
      const double w11 = fy * fx;
      out.dx(r0, c0) += w00 * gx;
      out.dy(r0, c0) += w00 * gy;
      out.dx(r0, c0 + 1) += w01 * gx;
      out.dy(r0, c0 + 1) += w01 * gy;
      out.dx(r0 + 1, c0) += w10 * gx;
      out.dy(r0 + 1, c0) += w10 * gy;
      out.dx(r0 + 1, c0 + 1) += w11 * gx;
      out.dy(r0 + 1, c0 + 1) += w11 * gy;
    }
  }
  return out;
}

}  // namespace toonwarp
