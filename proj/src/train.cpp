#include "toonwarp/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <string>

#include "toonwarp/adam.hpp"
#include "toonwarp/warp.hpp"

namespace toonwarp {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be >= 1");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lr decay must lie in (0, 1]");
  weights.validate();
}

namespace {

const CoarseField& require_field(const PairedSample& sample) {
  if (!sample.field) {
    throw Error(ErrorCode::InvalidDataset, "sample '" + sample.id + "' has no ground-truth field");
  }
  return *sample.field;
}

}  // namespace

LossReport sample_loss(const TinyPerceiver& model, const PairedSample& sample, const LossWeights& weights) {
  const CoarseField& target = require_field(sample);
  const PerceiverOutput out = perceiver_forward(model, sample.x_in);
  const DenseField dense = upsample(out.field, sample.x_in.height(), sample.x_in.width());
  return total_loss(warp(sample.x_in, dense), sample.x_toon, out.field, target, dense, weights);
}

SampleGradients sample_gradients(const TinyPerceiver& model, const PairedSample& sample, const LossWeights& weights) {
  const CoarseField& target = require_field(sample);
  const std::size_t h = sample.x_in.height();
  const std::size_t w = sample.x_in.width();
  const PerceiverOutput out = perceiver_forward(model, sample.x_in);
  const DenseField dense = upsample(out.field, h, w);
  const Image cartoon = warp(sample.x_in, dense);

  const ImageLoss recon = recon_loss(cartoon, sample.x_toon);
  const CoarseLoss warp_term = warp_field_loss(out.field, target);
  const DenseLoss reg = smooth_loss(dense);

  SampleGradients result;
  result.loss.recon = recon.value;
  result.loss.warp = warp_term.value;
  result.loss.reg = reg.value;
  result.loss.total = weights.recon * recon.value + weights.warp * warp_term.value + weights.reg * reg.value;

  Image upstream = recon.grad;
  for (double& g : upstream.values()) g *= weights.recon;
  DenseField dense_grad = warp_field_gradient(sample.x_in, dense, upstream);
  {
    auto g = dense_grad.values();
    const auto s = reg.grad.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += weights.reg * s[i];
  }
  CoarseGradient coarse_grad = upsample_adjoint(dense_grad, out.field.rows(), out.field.cols());
  {
    auto g = coarse_grad.values();
    const auto s = warp_term.grad.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += weights.warp * s[i];
  }
  result.grads = perceiver_backward(model, out.cache, coarse_grad);
  return result;
}

TrainResult train(TinyPerceiver model, std::span<const PairedSample> dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw Error(ErrorCode::InvalidDataset, "training set is empty");
  for (const PairedSample& s : dataset) require_field(s);

  std::mt19937_64 rng(cfg.seed);
  AdamState adam(model.parameters().size(), cfg.lr, cfg.beta1, cfg.beta2, cfg.lr_decay);
  TrainResult result{std::move(model), {}};
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<std::size_t> order(dataset.size());
  std::vector<double> batch_grad(adam.m.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    EpochReport report;
    report.lr = adam.lr;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const PairedSample sample = augment_pair(dataset[order[k]], rng, cfg.augment);
        const SampleGradients sg = sample_gradients(result.model, sample, cfg.weights);
        if (!std::isfinite(sg.loss.total)) {
          throw Error(ErrorCode::NumericFailure, "non-finite loss in epoch " + std::to_string(epoch) + " on sample '" +
                                                     sample.id + "'");
        }
        for (std::size_t i = 0; i < batch_grad.size(); ++i) batch_grad[i] += sg.grads[i];
        report.loss.recon += sg.loss.recon;
        report.loss.warp += sg.loss.warp;
        report.loss.reg += sg.loss.reg;
        report.loss.total += sg.loss.total;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : batch_grad) g *= inv;
      adam_step(result.model.parameters(), batch_grad, adam);
    }
    const double inv_n = 1.0 / static_cast<double>(dataset.size());
    report.loss.recon *= inv_n;
    report.loss.warp *= inv_n;
    report.loss.reg *= inv_n;
    report.loss.total *= inv_n;
    result.history.push_back(report);
    adam.decay_epoch();
  }
  return result;
}

Inference infer(const TinyPerceiver& model, const Image& image, double alpha) {
  Inference out;
  out.field = perceiver_forward(model, image).field;
  out.dense = upsample(scale_field(out.field, alpha), image.height(), image.width());
  out.cartoon = warp(image, out.dense);
  return out;
}

void write_loss_csv(const std::filesystem::path& path, std::span<const EpochReport> history) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "epoch,recon,warp,reg,total,lr\n" << std::setprecision(17);
  for (std::size_t e = 0; e < history.size(); ++e) {
    const auto& h = history[e];
    out << e << ',' << h.loss.recon << ',' << h.loss.warp << ',' << h.loss.reg << ',' << h.loss.total << ',' << h.lr
        << '\n';
  }
}

}  // namespace toonwarp
