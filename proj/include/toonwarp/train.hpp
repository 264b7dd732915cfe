#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "toonwarp/augment.hpp"
#include "toonwarp/dataset.hpp"
#include "toonwarp/losses.hpp"
#include "toonwarp/perceiver.hpp"

namespace toonwarp {

struct TrainConfig {
  int epochs = 200;
  std::size_t batch_size = 16;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double lr = 1e-3;
  double lr_decay = 0.95;  // per epoch
  LossWeights weights;
  AugmentOptions augment;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochReport {
  LossReport loss;  // mean over the epoch's samples, measured before each update
  double lr = 0.0;
};

struct TrainResult {
  TinyPerceiver model;
  std::vector<EpochReport> history;
};

struct SampleGradients {
  LossReport loss;
  std::vector<double> grads;  // aligned with model.parameters()
};

/// Full chain for one sample: perceiver -> upsample -> warp -> weighted loss,
/// and the gradient of the weighted total w.r.t. every parameter.
SampleGradients sample_gradients(const TinyPerceiver& model, const PairedSample& sample, const LossWeights& weights);

/// Forward-only version of sample_gradients.
LossReport sample_loss(const TinyPerceiver& model, const PairedSample& sample, const LossWeights& weights);

/// Mini-batch Adam with batch-averaged gradients and a per-epoch seeded
/// shuffle. Every sample must carry a ground-truth field.
TrainResult train(TinyPerceiver model, std::span<const PairedSample> dataset, const TrainConfig& cfg);

struct Inference {
  CoarseField field;
  DenseField dense;
  Image cartoon;
};

/// field = perceiver(image); dense = upsample(alpha * field); cartoon = warp(image, dense).
Inference infer(const TinyPerceiver& model, const Image& image, double alpha = 1.0);

/// CSV with header `epoch,recon,warp,reg,total,lr`.
void write_loss_csv(const std::filesystem::path& path, std::span<const EpochReport> history);

}  // namespace toonwarp
