#pragma once

#include <filesystem>

#include "toonwarp/image.hpp"

namespace toonwarp {

/// Decodes any PNG into 8-bit RGB, then to floats as value / 255.
Image read_png(const std::filesystem::path& path);

/// Clamps to [0, 1] and writes 8-bit RGB, rounding value * 255 to nearest.
void write_png(const std::filesystem::path& path, const Image& image);

/// The value an 8-bit PNG roundtrip would produce.
double quantize_8bit(double v);

}  // namespace toonwarp
