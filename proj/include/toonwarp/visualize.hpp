#pragma once

#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

/// Optical-flow color-wheel rendering: hue from the displacement angle,
/// saturation from its length relative to the longest vector in the field.
/// A zero field renders white.
Image visualize_field(const DenseField& field);

/// Color of a single displacement already normalized so |(u, v)| <= 1.
Rgb flow_color(double u, double v);

}  // namespace toonwarp
