#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "toonwarp/adam.hpp"
#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

struct FitConfig {
  int iterations = 500;
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double smooth_weight = 0.0;
  std::size_t grid_rows = kCoarseSize;
  std::size_t grid_cols = kCoarseSize;
  std::optional<CoarseField> init;
  // Early exit once the best residual improved by less than `tolerance`
  // over the last `window` iterations.
  double tolerance = 1e-6;
  int window = 20;

  void validate() const;
};

struct FitResult {
  CoarseField field;               // best iterate seen
  std::vector<double> residuals;   // mean-L1 residual of each evaluated iterate
  double best_residual = 0.0;
};

/// Recovers the coarse field whose upsampled warp of x_in best matches
/// x_toon in mean L1, by Adam on upsample -> warp -> L1.
FitResult fit_field(const Image& x_in, const Image& x_toon, const FitConfig& cfg = {});

/// fit_field for every pair, in order. Failures are rethrown with the pair index.
std::vector<FitResult> fit_dataset(std::span<const std::pair<Image, Image>> pairs, const FitConfig& cfg = {});

/// Mean-L1 residual of x_toon against warp(x_in, upsample(field)).
double fit_residual(const Image& x_in, const Image& x_toon, const CoarseField& field);

/// CSV with header `iteration,residual`.
void write_residual_csv(const std::filesystem::path& path, std::span<const double> residuals);

}  // namespace toonwarp
