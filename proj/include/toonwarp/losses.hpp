#pragma once

#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

struct LossWeights {
  double recon = 1.0;
  double warp = 0.7;
  double reg = 1e-6;

  void validate() const;
};

struct LossReport {
  double recon = 0.0;
  double warp = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

struct ImageLoss {
  double value;
  Image grad;
};

struct CoarseLoss {
  double value;
  CoarseGradient grad;
};

struct DenseLoss {
  double value;
  DenseField grad;
};

/// Stabilizer in the cosine denominators of smooth_loss.
inline constexpr double kCosineEps = 1e-8;

/// Mean absolute difference; gradient sign(predicted - target) / N with sign(0) = 0.
ImageLoss recon_loss(const Image& predicted, const Image& target);

/// Mean absolute difference over all cells and both components.
CoarseLoss warp_field_loss(const CoarseField& predicted, const CoarseField& target);

/// Sum over horizontal and vertical neighbor pairs of 1 - cos(angle between
/// the two displacement vectors). Cells on the top row / left column have no
/// up / left partner and contribute nothing for that direction.
DenseLoss smooth_loss(const DenseField& field);

/// Weighted combination of the three terms. `dense_predicted` must be
/// upsample(predicted_field) at the image resolution.
LossReport total_loss(const Image& predicted_image, const Image& target_image, const CoarseField& predicted_field,
                      const CoarseField& target_field, const DenseField& dense_predicted,
                      const LossWeights& weights = {});

}  // namespace toonwarp
