#pragma once

#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

/// Bilinear read at continuous (x = column, y = row). Coordinates outside the
/// image are clamped to the border.
Rgb sample_bilinear(const Image& image, double x, double y);

/// Backward-mapping warp: out(i, j) = sample_bilinear(image, j + dx(i, j), i + dy(i, j)).
Image warp(const Image& image, const DenseField& field);

struct WarpGradients {
  Image d_image;
  DenseField d_field;
};

/// Exact gradients of warp() given the upstream gradient w.r.t. its output.
/// Along an axis whose sample coordinate was clamped, the field gradient is 0.
WarpGradients warp_backward(const Image& image, const DenseField& field, const Image& upstream);

/// Field half of warp_backward, for callers that never need d_image.
DenseField warp_field_gradient(const Image& image, const DenseField& field, const Image& upstream);

}  // namespace toonwarp
