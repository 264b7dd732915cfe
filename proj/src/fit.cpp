#include "toonwarp/fit.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "toonwarp/losses.hpp"
#include "toonwarp/parallel.hpp"
#include "toonwarp/warp.hpp"

namespace toonwarp {

void FitConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "fit iterations must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::InvalidArgument, "fit learning rate must be > 0");
  if (!(smooth_weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "fit smoothness weight must be >= 0");
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "fit convergence window must be >= 1");
  if (init && (init->rows() != grid_rows || init->cols() != grid_cols)) {
    throw Error(ErrorCode::InvalidArgument, "initial field does not match the fit grid");
  }
}

double fit_residual(const Image& x_in, const Image& x_toon, const CoarseField& field) {
  const DenseField dense = upsample(field, x_in.height(), x_in.width());
  return recon_loss(warp(x_in, dense), x_toon).value;
}

FitResult fit_field(const Image& x_in, const Image& x_toon, const FitConfig& cfg) {
  cfg.validate();
  if (!x_in.same_shape(x_toon)) {
    throw Error(ErrorCode::InvalidArgument, "fit: input and target images differ in size");
  }
  CoarseField field = cfg.init ? *cfg.init : zero_field(cfg.grid_rows, cfg.grid_cols);
  AdamState adam(field.values().size(), cfg.lr, cfg.beta1, cfg.beta2);

  FitResult result{field, {}, INFINITY};
  std::vector<double> best_so_far;
  result.residuals.reserve(cfg.iterations + 1);

  for (int it = 0; it <= cfg.iterations; ++it) {
    const DenseField dense = upsample(field, x_in.height(), x_in.width());
    const ImageLoss loss = recon_loss(warp(x_in, dense), x_toon);
    if (!std::isfinite(loss.value)) {
      throw Error(ErrorCode::NumericFailure, "fit: non-finite residual at iteration " + std::to_string(it));
    }
    result.residuals.push_back(loss.value);
    if (loss.value < result.best_residual) {
      result.best_residual = loss.value;
      result.field = field;
    }
    best_so_far.push_back(result.best_residual);

    if (it == cfg.iterations) break;
    if (it >= cfg.window && best_so_far[it - cfg.window] - result.best_residual < cfg.tolerance) break;

    DenseField dense_grad = warp_field_gradient(x_in, dense, loss.grad);
    if (cfg.smooth_weight > 0.0) {
      const DenseLoss smooth = smooth_loss(dense);
      auto g = dense_grad.values();
      const auto s = smooth.grad.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += cfg.smooth_weight * s[i];
    }
    const CoarseGradient grad = upsample_adjoint(dense_grad, field.rows(), field.cols());
    for (double g : grad.values()) {
      if (!std::isfinite(g)) {
        throw Error(ErrorCode::NumericFailure, "fit: non-finite gradient at iteration " + std::to_string(it));
      }
    }
    adam_step(field.values(), grad.values(), adam);
  }
  return result;
}

std::vector<FitResult> fit_dataset(std::span<const std::pair<Image, Image>> pairs, const FitConfig& cfg) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "fit_dataset: no pairs given");
  std::vector<std::optional<FitResult>> slots(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    try {
      slots[i] = fit_field(pairs[i].first, pairs[i].second, cfg);
    } catch (const Error& e) {
      throw Error(e.code(), "pair " + std::to_string(i) + ": " + e.what());
    }
  });
  std::vector<FitResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void write_residual_csv(const std::filesystem::path& path, std::span<const double> residuals) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "iteration,residual\n" << std::setprecision(17);
  for (std::size_t i = 0; i < residuals.size(); ++i) out << i << ',' << residuals[i] << '\n';
}

}  // namespace toonwarp
