#pragma once

#include <random>

#include "toonwarp/dataset.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

/// Factors of 1 and a hue shift of 0 leave an image untouched.
struct JitterParams {
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
  double hue = 0.0;  // fraction of a full turn
};

/// Brightness scales values; contrast blends toward the image's mean Rec.601
/// luminance; saturation blends toward each pixel's luminance; hue rotates
/// the HSV hue. Applied in that order, clamping to [0, 1] after each step.
Image color_jitter(const Image& image, const JitterParams& params);

/// brightness, contrast, saturation ~ U[0.9, 1.1]; hue ~ U[-0.05, 0.05].
JitterParams sample_jitter(std::mt19937_64& rng);

struct AugmentOptions {
  bool flip = true;
  bool jitter = true;
};

/// Deterministic core: flip input, target and field together, then apply the
/// same jitter to both images.
PairedSample augment_pair(const PairedSample& sample, bool flip, const JitterParams& jitter);

/// Flip with probability 0.5, jitter with freshly sampled parameters.
PairedSample augment_pair(const PairedSample& sample, std::mt19937_64& rng, const AugmentOptions& options = {});

}  // namespace toonwarp
