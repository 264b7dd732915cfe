#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

/// Channel-major activation volume.
struct Tensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t c, std::size_t h, std::size_t w) : channels(c), height(h), width(w), data(c * h * w, 0.0) {}

  double& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
  bool same_shape(const Tensor& o) const { return channels == o.channels && height == o.height && width == o.width; }
};

/// Weights live in the model's flat parameter vector; the layer keeps offsets.
/// Weight layout is [out][in][ky][kx], followed by `out` biases.
struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  std::size_t weight_count() const { return out_channels * in_channels * kernel * kernel; }
  std::size_t output_extent(std::size_t in) const { return (in + 2 * padding - kernel) / stride + 1; }
};

struct LeakyRelu {
  double negative_slope = 0.1;
};

/// Averages onto a fixed output grid regardless of input size.
struct AdaptiveAvgPool {
  std::size_t out_height = kCoarseSize;
  std::size_t out_width = kCoarseSize;
};

using Layer = std::variant<Conv2d, LeakyRelu, AdaptiveAvgPool>;

struct PerceiverOptions {
  std::size_t input_size = 128;
  // Append normalized (x, y) coordinate planes to the RGB input.
  bool coord_channels = true;
};

/// Small convolutional network mapping an image to a 32x32x2 coarse field.
class TinyPerceiver {
 public:
  TinyPerceiver() = default;
  TinyPerceiver(PerceiverOptions options, std::vector<Layer> layers);

  const PerceiverOptions& options() const noexcept { return options_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::size_t input_channels() const noexcept { return options_.coord_channels ? 5 : 3; }

  std::span<float> parameters() noexcept { return params_; }
  std::span<const float> parameters() const noexcept { return params_; }

  friend bool operator==(const TinyPerceiver& a, const TinyPerceiver& b);

 private:
  PerceiverOptions options_;
  std::vector<Layer> layers_;
  std::vector<float> params_;
};

/// Reference architecture: conv k3s2 -> act -> conv k3s2 -> act -> conv k3s1
/// -> act -> conv k3s1 (2 channels) -> adaptive pool 32x32. Hidden convs use
/// uniform fan-in init; the output conv starts at zero (identity warp).
TinyPerceiver make_reference_perceiver(std::uint64_t seed, PerceiverOptions options = {});

/// Minimum accepted input image size (both dimensions).
inline constexpr std::size_t kMinPerceiverInput = 64;

struct ForwardCache {
  std::vector<Tensor> activations;  // input to each layer, then the final output
};

struct PerceiverOutput {
  CoarseField field;
  ForwardCache cache;
};

PerceiverOutput perceiver_forward(const TinyPerceiver& model, const Image& image);

/// Gradient of every parameter, flat and aligned with model.parameters().
std::vector<double> perceiver_backward(const TinyPerceiver& model, const ForwardCache& cache,
                                       const CoarseGradient& grad_field);

/// Checkpoint: "ATCK", u32 version, u32 input size, u32 flags, u32 layer count,
/// layer manifest (activation slopes as float64 bits), u32 parameter count,
/// parameters as little-endian float32.
std::vector<std::uint8_t> encode_checkpoint(const TinyPerceiver& model);
TinyPerceiver decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const TinyPerceiver& model, const std::filesystem::path& path);
TinyPerceiver load_checkpoint(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace toonwarp
