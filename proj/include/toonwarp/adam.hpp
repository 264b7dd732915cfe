#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace toonwarp {

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double lr = 1e-3;
  double lr_decay = 1.0;  // applied by decay_epoch()

  AdamState() = default;
  AdamState(std::size_t n_params, double lr, double beta1, double beta2, double lr_decay = 1.0,
            double epsilon = 1e-8);

  void decay_epoch() { lr *= lr_decay; }
};

/// Bias-corrected Adam update, in place:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);
void adam_step(std::span<float> params, std::span<const double> grads, AdamState& state);

}  // namespace toonwarp
