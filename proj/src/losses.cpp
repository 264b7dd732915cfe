#include "toonwarp/losses.hpp"

#include <cmath>
#include <string>

namespace toonwarp {

void LossWeights::validate() const {
  for (double w : {recon, warp, reg}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "loss weights must be finite and non-negative");
    }
  }
}

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// One neighbor term 1 - <u,v> / (|u||v| + eps), accumulating its gradient.
double cosine_term(double ux, double uy, double vx, double vy, double* gu, double* gv) {
  const double nu = std::hypot(ux, uy);
  const double nv = std::hypot(vx, vy);
  const double dot = ux * vx + uy * vy;
  const double denom = nu * nv + kCosineEps;
  const double cos = dot / denom;
  // d cos / du = v / denom - dot / denom^2 * |v| * u / |u|
  const double k = dot / (denom * denom);
  const double su = nu > 0.0 ? k * nv / nu : 0.0;
  const double sv = nv > 0.0 ? k * nu / nv : 0.0;
  gu[0] -= vx / denom - su * ux;
  gu[1] -= vy / denom - su * uy;
  gv[0] -= ux / denom - sv * vx;
  gv[1] -= uy / denom - sv * vy;
  return 1.0 - cos;
}

}  // namespace

ImageLoss recon_loss(const Image& predicted, const Image& target) {
  if (!predicted.same_shape(target)) {
    throw Error(ErrorCode::InvalidArgument, "reconstruction loss: image shapes differ");
  }
  ImageLoss out{0.0, Image(predicted.height(), predicted.width())};
  const auto p = predicted.values();
  const auto t = target.values();
  auto g = out.grad.values();
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    sum += std::abs(d);
    g[i] = sign(d) * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

CoarseLoss warp_field_loss(const CoarseField& predicted, const CoarseField& target) {
  if (!predicted.same_shape(target)) {
    throw Error(ErrorCode::InvalidArgument, "warp loss: field grids differ (" + std::to_string(predicted.rows()) +
                                                "x" + std::to_string(predicted.cols()) + " vs " +
                                                std::to_string(target.rows()) + "x" + std::to_string(target.cols()) +
                                                ")");
  }
  CoarseLoss out{0.0, CoarseGradient(predicted.rows(), predicted.cols())};
  const auto p = predicted.values();
  const auto t = target.values();
  auto g = out.grad.values();
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    sum += std::abs(d);
    g[i] = sign(d) * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

DenseLoss smooth_loss(const DenseField& field) {
  DenseLoss out{0.0, DenseField(field.rows(), field.cols())};
  auto g = out.grad.values();
  const auto f = field.values();
  const std::size_t cols = field.cols();
  double sum = 0.0;
  for (std::size_t r = 0; r < field.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t here = (r * cols + c) * 2;
      if (c > 0) {
        const std::size_t left = here - 2;
        sum += cosine_term(f[left], f[left + 1], f[here], f[here + 1], &g[left], &g[here]);
      }
      if (r > 0) {
        const std::size_t up = here - cols * 2;
        sum += cosine_term(f[up], f[up + 1], f[here], f[here + 1], &g[up], &g[here]);
      }
    }
  }
  out.value = sum;
  return out;
}

LossReport total_loss(const Image& predicted_image, const Image& target_image, const CoarseField& predicted_field,
                      const CoarseField& target_field, const DenseField& dense_predicted,
                      const LossWeights& weights) {
  weights.validate();
  if (dense_predicted.rows() != predicted_image.height() || dense_predicted.cols() != predicted_image.width()) {
    throw Error(ErrorCode::InvalidArgument, "dense field does not match the image resolution");
  }
  LossReport report;
  report.recon = recon_loss(predicted_image, target_image).value;
  report.warp = warp_field_loss(predicted_field, target_field).value;
  report.reg = smooth_loss(dense_predicted).value;
  report.total = weights.recon * report.recon + weights.warp * report.warp + weights.reg * report.reg;
  return report;
}

}  // namespace toonwarp
