#include "toonwarp/perceiver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "toonwarp/parallel.hpp"

namespace toonwarp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::size_t assign_offsets(std::vector<Layer>& layers) {
  std::size_t offset = 0;
  for (Layer& layer : layers) {
    if (auto* conv = std::get_if<Conv2d>(&layer)) {
      conv->weight_offset = offset;
      offset += conv->weight_count();
      conv->bias_offset = offset;
      offset += conv->out_channels;
    }
  }
  return offset;
}

// Output indices [lo, hi) whose tap at kernel offset `k_off` lands inside the input.
struct Span {
  std::size_t lo;
  std::size_t hi;
};

Span valid_outputs(std::size_t k_off, std::size_t pad, std::size_t stride, std::size_t in_extent,
                   std::size_t out_extent) {
  const auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
  const std::size_t lo = pad > k_off ? ceil_div(pad - k_off, stride) : 0;
  const std::size_t hi = std::min(out_extent, ceil_div(in_extent + pad - k_off, stride));
  return {std::min(lo, hi), hi};
}

Tensor conv_forward(const Conv2d& conv, std::span<const float> params, const Tensor& in) {
  const std::size_t oh = conv.output_extent(in.height);
  const std::size_t ow = conv.output_extent(in.width);
  Tensor out(conv.out_channels, oh, ow);
  const float* weights = params.data() + conv.weight_offset;
  const float* bias = params.data() + conv.bias_offset;
  const std::size_t k = conv.kernel;

  parallel_for(conv.out_channels, [&](std::size_t co) {
    double* plane = &out.data[co * oh * ow];
    std::fill(plane, plane + oh * ow, static_cast<double>(bias[co]));
    for (std::size_t ci = 0; ci < conv.in_channels; ++ci) {
      const double* src = &in.data[ci * in.height * in.width];
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const double w = weights[((co * conv.in_channels + ci) * k + ky) * k + kx];
          if (w == 0.0) continue;
          const Span ys = valid_outputs(ky, conv.padding, conv.stride, in.height, oh);
          const Span xs = valid_outputs(kx, conv.padding, conv.stride, in.width, ow);
          for (std::size_t oy = ys.lo; oy < ys.hi; ++oy) {
            const double* row = src + (oy * conv.stride + ky - conv.padding) * in.width + kx - conv.padding;
            double* dst = plane + oy * ow;
            if (conv.stride == 1) {
              for (std::size_t ox = xs.lo; ox < xs.hi; ++ox) dst[ox] += w * row[ox];
            } else {
              for (std::size_t ox = xs.lo; ox < xs.hi; ++ox) dst[ox] += w * row[ox * conv.stride];
            }
          }
        }
      }
    }
  });
  return out;
}

// Accumulates weight/bias gradients into `grads` and returns the input gradient
// (empty when `need_input_grad` is false).
Tensor conv_backward(const Conv2d& conv, std::span<const float> params, const Tensor& in, const Tensor& grad_out,
                     std::span<double> grads, bool need_input_grad) {
  const std::size_t oh = grad_out.height;
  const std::size_t ow = grad_out.width;
  const std::size_t k = conv.kernel;
  const float* weights = params.data() + conv.weight_offset;
  double* d_weights = grads.data() + conv.weight_offset;
  double* d_bias = grads.data() + conv.bias_offset;

  parallel_for(conv.out_channels, [&](std::size_t co) {
    const double* g = &grad_out.data[co * oh * ow];
    double sum = 0.0;
    for (std::size_t i = 0; i < oh * ow; ++i) sum += g[i];
    d_bias[co] += sum;
    for (std::size_t ci = 0; ci < conv.in_channels; ++ci) {
      const double* src = &in.data[ci * in.height * in.width];
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          double acc = 0.0;
          const Span ys = valid_outputs(ky, conv.padding, conv.stride, in.height, oh);
          const Span xs = valid_outputs(kx, conv.padding, conv.stride, in.width, ow);
          for (std::size_t oy = ys.lo; oy < ys.hi; ++oy) {
            const double* row = src + (oy * conv.stride + ky - conv.padding) * in.width + kx - conv.padding;
            const double* grow = g + oy * ow;
            for (std::size_t ox = xs.lo; ox < xs.hi; ++ox) acc += grow[ox] * row[ox * conv.stride];
          }
          d_weights[((co * conv.in_channels + ci) * k + ky) * k + kx] += acc;
        }
      }
    }
  });

  if (!need_input_grad) return {};
  Tensor grad_in(in.channels, in.height, in.width);
  parallel_for(conv.in_channels, [&](std::size_t ci) {
    double* dst = &grad_in.data[ci * in.height * in.width];
    for (std::size_t co = 0; co < conv.out_channels; ++co) {
      const double* g = &grad_out.data[co * oh * ow];
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const double w = weights[((co * conv.in_channels + ci) * k + ky) * k + kx];
          if (w == 0.0) continue;
          const Span ys = valid_outputs(ky, conv.padding, conv.stride, in.height, oh);
          const Span xs = valid_outputs(kx, conv.padding, conv.stride, in.width, ow);
          for (std::size_t oy = ys.lo; oy < ys.hi; ++oy) {
            double* row = dst + (oy * conv.stride + ky - conv.padding) * in.width + kx - conv.padding;
            const double* grow = g + oy * ow;
            for (std::size_t ox = xs.lo; ox < xs.hi; ++ox) row[ox * conv.stride] += w * grow[ox];
          }
        }
      }
    }
  });
  return grad_in;
}

struct PoolWindow {
  std::size_t begin;
  std::size_t end;
};

PoolWindow pool_window(std::size_t out_index, std::size_t in_extent, std::size_t out_extent) {
  return {out_index * in_extent / out_extent, ((out_index + 1) * in_extent + out_extent - 1) / out_extent};
}

Tensor pool_forward(const AdaptiveAvgPool& pool, const Tensor& in) {
  Tensor out(in.channels, pool.out_height, pool.out_width);
  for (std::size_t c = 0; c < in.channels; ++c) {
    for (std::size_t oy = 0; oy < pool.out_height; ++oy) {
      const PoolWindow wy = pool_window(oy, in.height, pool.out_height);
      for (std::size_t ox = 0; ox < pool.out_width; ++ox) {
        const PoolWindow wx = pool_window(ox, in.width, pool.out_width);
        double sum = 0.0;
        for (std::size_t y = wy.begin; y < wy.end; ++y) {
          for (std::size_t x = wx.begin; x < wx.end; ++x) sum += in.at(c, y, x);
        }
        out.at(c, oy, ox) = sum / static_cast<double>((wy.end - wy.begin) * (wx.end - wx.begin));
      }
    }
  }
  return out;
}

Tensor pool_backward(const AdaptiveAvgPool& pool, const Tensor& in, const Tensor& grad_out) {
  Tensor grad_in(in.channels, in.height, in.width);
  for (std::size_t c = 0; c < in.channels; ++c) {
    for (std::size_t oy = 0; oy < pool.out_height; ++oy) {
      const PoolWindow wy = pool_window(oy, in.height, pool.out_height);
      for (std::size_t ox = 0; ox < pool.out_width; ++ox) {
        const PoolWindow wx = pool_window(ox, in.width, pool.out_width);
        const double g =
            grad_out.at(c, oy, ox) / static_cast<double>((wy.end - wy.begin) * (wx.end - wx.begin));
        for (std::size_t y = wy.begin; y < wy.end; ++y) {
          for (std::size_t x = wx.begin; x < wx.end; ++x) grad_in.at(c, y, x) += g;
        }
      }
    }
  }
  return grad_in;
}

Tensor image_to_input(const TinyPerceiver& model, const Image& image) {
  const std::size_t n = model.options().input_size;
  const Image resized = resize_bilinear(image, n, n);
  Tensor t(model.input_channels(), n, n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t c = 0; c < 3; ++c) t.at(c, y, x) = resized.at(y, x, c) - 0.5;
      if (model.options().coord_channels) {
        t.at(3, y, x) = 2.0 * static_cast<double>(x) / static_cast<double>(n - 1) - 1.0;
        t.at(4, y, x) = 2.0 * static_cast<double>(y) / static_cast<double>(n - 1) - 1.0;
      }
    }
  }
  return t;
}

// Shape every layer input must have for this model; used to validate caches.
std::vector<Tensor> expected_shapes(const TinyPerceiver& model) {
  std::vector<Tensor> shapes;
  std::size_t c = model.input_channels();
  std::size_t h = model.options().input_size;
  std::size_t w = h;
  for (const Layer& layer : model.layers()) {
    Tensor s;
    s.channels = c;
    s.height = h;
    s.width = w;
    shapes.push_back(s);
    std::visit(overloaded{[&](const Conv2d& conv) {
                            c = conv.out_channels;
                            h = conv.output_extent(h);
                            w = conv.output_extent(w);
                          },
                          [](const LeakyRelu&) {},
                          [&](const AdaptiveAvgPool& pool) {
                            h = pool.out_height;
                            w = pool.out_width;
                          }},
               layer);
  }
  Tensor s;
  s.channels = c;
  s.height = h;
  s.width = w;
  shapes.push_back(s);
  return shapes;
}

}  // namespace

TinyPerceiver::TinyPerceiver(PerceiverOptions options, std::vector<Layer> layers)
    : options_(options), layers_(std::move(layers)) {
  if (options_.input_size < kMinPerceiverInput) {
    throw Error(ErrorCode::InvalidArgument, "perceiver input size must be >= " + std::to_string(kMinPerceiverInput));
  }
  params_.assign(assign_offsets(layers_), 0.0f);
  const auto shapes = expected_shapes(*this);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (const auto* conv = std::get_if<Conv2d>(&layers_[i])) {
      if (conv->in_channels != shapes[i].channels || conv->kernel == 0 || conv->stride == 0 ||
          shapes[i].height + 2 * conv->padding < conv->kernel) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(i) + ": inconsistent convolution");
      }
    }
  }
  const Tensor& out = shapes.back();
  if (out.channels != 2 || out.height != kCoarseSize || out.width != kCoarseSize) {
    throw Error(ErrorCode::InvalidArgument, "perceiver must end in a 2x32x32 output");
  }
}

bool operator==(const TinyPerceiver& a, const TinyPerceiver& b) {
  if (a.options_.input_size != b.options_.input_size || a.options_.coord_channels != b.options_.coord_channels ||
      a.layers_.size() != b.layers_.size() || a.params_.size() != b.params_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].index() != b.layers_[i].index()) return false;
    const bool same = std::visit(
        overloaded{[&](const Conv2d& x) {
                     const auto& y = std::get<Conv2d>(b.layers_[i]);
                     return x.in_channels == y.in_channels && x.out_channels == y.out_channels &&
                            x.kernel == y.kernel && x.stride == y.stride && x.padding == y.padding;
                   },
                   [&](const LeakyRelu& x) { return x.negative_slope == std::get<LeakyRelu>(b.layers_[i]).negative_slope; },
                   [&](const AdaptiveAvgPool& x) {
                     const auto& y = std::get<AdaptiveAvgPool>(b.layers_[i]);
                     return x.out_height == y.out_height && x.out_width == y.out_width;
                   }},
        a.layers_[i]);
    if (!same) return false;
  }
  // Bitwise comparison so that -0.0f and 0.0f count as different.
  for (std::size_t i = 0; i < a.params_.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(a.params_[i]) != std::bit_cast<std::uint32_t>(b.params_[i])) return false;
  }
  return true;
}

TinyPerceiver make_reference_perceiver(std::uint64_t seed, PerceiverOptions options) {
  const std::size_t in_ch = options.coord_channels ? 5 : 3;
  std::vector<Layer> layers{
      Conv2d{in_ch, 16, 3, 2, 1}, LeakyRelu{},       Conv2d{16, 32, 3, 2, 1}, LeakyRelu{},
      Conv2d{32, 32, 3, 1, 1},    LeakyRelu{},       Conv2d{32, 2, 3, 1, 1},  AdaptiveAvgPool{},
  };
  TinyPerceiver model(options, std::move(layers));

  std::mt19937_64 rng(seed);
  auto params = model.parameters();
  const Conv2d* last = nullptr;
  for (const Layer& layer : model.layers()) {
    if (const auto* conv = std::get_if<Conv2d>(&layer)) last = conv;
  }
  for (const Layer& layer : model.layers()) {
    const auto* conv = std::get_if<Conv2d>(&layer);
    if (conv == nullptr || conv == last) continue;
    const double fan_in = static_cast<double>(conv->in_channels * conv->kernel * conv->kernel);
    std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / fan_in), std::sqrt(6.0 / fan_in));
    for (std::size_t i = 0; i < conv->weight_count(); ++i) {
      params[conv->weight_offset + i] = static_cast<float>(dist(rng));
    }
  }
  return model;
}

PerceiverOutput perceiver_forward(const TinyPerceiver& model, const Image& image) {
  if (image.height() < kMinPerceiverInput || image.width() < kMinPerceiverInput) {
    throw Error(ErrorCode::InvalidArgument, "perceiver input " + std::to_string(image.height()) + "x" +
                                                std::to_string(image.width()) + " is below the " +
                                                std::to_string(kMinPerceiverInput) + "x" +
                                                std::to_string(kMinPerceiverInput) + " minimum");
  }
  PerceiverOutput out;
  auto& acts = out.cache.activations;
  acts.reserve(model.layers().size() + 1);
  acts.push_back(image_to_input(model, image));
  for (const Layer& layer : model.layers()) {
    const Tensor& x = acts.back();
    Tensor y = std::visit(overloaded{[&](const Conv2d& conv) { return conv_forward(conv, model.parameters(), x); },
                                     [&](const LeakyRelu& act) {
                                       Tensor t = x;
                                       for (double& v : t.data) v = v > 0.0 ? v : v * act.negative_slope;
                                       return t;
                                     },
                                     [&](const AdaptiveAvgPool& pool) { return pool_forward(pool, x); }},
                          layer);
    acts.push_back(std::move(y));
  }
  const Tensor& last = acts.back();
  out.field = CoarseField(last.height, last.width);
  for (std::size_t r = 0; r < last.height; ++r) {
    for (std::size_t c = 0; c < last.width; ++c) {
      out.field.dx(r, c) = static_cast<float>(last.at(0, r, c));
      out.field.dy(r, c) = static_cast<float>(last.at(1, r, c));
    }
  }
  return out;
}

std::vector<double> perceiver_backward(const TinyPerceiver& model, const ForwardCache& cache,
                                       const CoarseGradient& grad_field) {
  const auto shapes = expected_shapes(model);
  const auto& acts = cache.activations;
  if (acts.size() != shapes.size()) {
    throw Error(ErrorCode::InvalidArgument, "forward cache does not belong to this model (layer count differs)");
  }
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (!acts[i].same_shape(shapes[i]) || acts[i].data.size() != shapes[i].channels * shapes[i].height * shapes[i].width) {
      throw Error(ErrorCode::InvalidArgument, "forward cache does not belong to this model (activation " +
                                                  std::to_string(i) + " has the wrong shape)");
    }
  }
  const Tensor& out = acts.back();
  if (grad_field.rows() != out.height || grad_field.cols() != out.width) {
    throw Error(ErrorCode::InvalidArgument, "field gradient shape does not match the perceiver output");
  }

  std::vector<double> grads(model.parameters().size(), 0.0);
  Tensor grad(2, out.height, out.width);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      grad.at(0, r, c) = grad_field.dx(r, c);
      grad.at(1, r, c) = grad_field.dy(r, c);
    }
  }

  for (std::size_t i = model.layers().size(); i-- > 0;) {
    const Tensor& x = acts[i];
    grad = std::visit(overloaded{[&](const Conv2d& conv) {
                                   return conv_backward(conv, model.parameters(), x, grad, grads, i > 0);
                                 },
                                 [&](const LeakyRelu& act) {
                                   Tensor g = std::move(grad);
                                   for (std::size_t j = 0; j < g.data.size(); ++j) {
                                     if (!(x.data[j] > 0.0)) g.data[j] *= act.negative_slope;
                                   }
                                   return g;
                                 },
                                 [&](const AdaptiveAvgPool& pool) { return pool_backward(pool, x, grad); }},
                      model.layers()[i]);
  }
  return grads;
}

}  // namespace toonwarp
