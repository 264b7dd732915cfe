#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "toonwarp/field_io.hpp"
#include "toonwarp/perceiver.hpp"

namespace toonwarp {

namespace {

constexpr char kCheckpointMagic[4] = {'A', 'T', 'C', 'K'};
constexpr std::uint32_t kFlagCoordChannels = 1u;

enum class LayerKind : std::uint32_t { Conv = 1, LeakyRelu = 2, AdaptiveAvgPool = 3 };

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    const std::uint32_t v = le::get_u32(bytes_.data() + pos_);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    const std::uint64_t lo = u32(what);
    const std::uint64_t hi = u32(what);
    return std::bit_cast<double>(lo | (hi << 32));
  }
  float f32(const char* what) {
    need(4, what);
    const float v = le::get_f32(bytes_.data() + pos_);
    pos_ += 4;
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::Format, std::string("checkpoint truncated while reading ") + what);
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TinyPerceiver& model) {
  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  le::put_u32(out, kCheckpointVersion);
  le::put_u32(out, static_cast<std::uint32_t>(model.options().input_size));
  le::put_u32(out, model.options().coord_channels ? kFlagCoordChannels : 0u);
  le::put_u32(out, static_cast<std::uint32_t>(model.layers().size()));
  for (const Layer& layer : model.layers()) {
    if (const auto* conv = std::get_if<Conv2d>(&layer)) {
      le::put_u32(out, static_cast<std::uint32_t>(LayerKind::Conv));
      le::put_u32(out, static_cast<std::uint32_t>(conv->in_channels));
      le::put_u32(out, static_cast<std::uint32_t>(conv->out_channels));
      le::put_u32(out, static_cast<std::uint32_t>(conv->kernel));
      le::put_u32(out, static_cast<std::uint32_t>(conv->stride));
      le::put_u32(out, static_cast<std::uint32_t>(conv->padding));
    } else if (const auto* act = std::get_if<LeakyRelu>(&layer)) {
      le::put_u32(out, static_cast<std::uint32_t>(LayerKind::LeakyRelu));
      const auto bits = std::bit_cast<std::uint64_t>(act->negative_slope);
      le::put_u32(out, static_cast<std::uint32_t>(bits));
      le::put_u32(out, static_cast<std::uint32_t>(bits >> 32));
    } else {
      const auto& pool = std::get<AdaptiveAvgPool>(layer);
      le::put_u32(out, static_cast<std::uint32_t>(LayerKind::AdaptiveAvgPool));
      le::put_u32(out, static_cast<std::uint32_t>(pool.out_height));
      le::put_u32(out, static_cast<std::uint32_t>(pool.out_width));
    }
  }
  le::put_u32(out, static_cast<std::uint32_t>(model.parameters().size()));
  for (float p : model.parameters()) le::put_f32(out, p);
  return out;
}

TinyPerceiver decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::Format, "bad checkpoint magic, expected 'ATCK'");
  }
  std::vector<std::uint8_t> body(bytes.begin() + 4, bytes.end());
  Reader in(body);
  const std::uint32_t version = in.u32("version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::Format, "unsupported checkpoint version " + std::to_string(version) + ", expected " +
                                       std::to_string(kCheckpointVersion));
  }
  PerceiverOptions options;
  options.input_size = in.u32("input size");
  const std::uint32_t flags = in.u32("flags");
  if ((flags & ~kFlagCoordChannels) != 0) {
    throw Error(ErrorCode::Format, "unknown checkpoint flags " + std::to_string(flags));
  }
  options.coord_channels = (flags & kFlagCoordChannels) != 0;
  const std::uint32_t layer_count = in.u32("layer count");
  if (layer_count > 1024) throw Error(ErrorCode::Format, "implausible layer count " + std::to_string(layer_count));

  std::vector<Layer> layers;
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::uint32_t kind = in.u32("layer kind");
    switch (static_cast<LayerKind>(kind)) {
      case LayerKind::Conv: {
        Conv2d conv;
        conv.in_channels = in.u32("conv in");
        conv.out_channels = in.u32("conv out");
        conv.kernel = in.u32("conv kernel");
        conv.stride = in.u32("conv stride");
        conv.padding = in.u32("conv padding");
        layers.emplace_back(conv);
        break;
      }
      case LayerKind::LeakyRelu:
        layers.emplace_back(LeakyRelu{in.f64("slope")});
        break;
      case LayerKind::AdaptiveAvgPool: {
        AdaptiveAvgPool pool;
        pool.out_height = in.u32("pool height");
        pool.out_width = in.u32("pool width");
        layers.emplace_back(pool);
        break;
      }
      default:
        throw Error(ErrorCode::Format, "unknown layer kind " + std::to_string(kind) + " at layer " + std::to_string(i));
    }
  }

  TinyPerceiver model = [&] {
    try {
      return TinyPerceiver(options, std::move(layers));
    } catch (const Error& e) {
      throw Error(ErrorCode::Format, std::string("invalid layer manifest: ") + e.what());
    }
  }();

  const std::uint32_t count = in.u32("parameter count");
  auto params = model.parameters();
  if (count != params.size()) {
    throw Error(ErrorCode::Format, "parameter count " + std::to_string(count) + " does not match manifest (" +
                                       std::to_string(params.size()) + ")");
  }
  if (in.remaining() != std::size_t{count} * 4) {
    throw Error(ErrorCode::Format, "checkpoint payload size mismatch: expected " + std::to_string(std::size_t{count} * 4) +
                                       " bytes, got " + std::to_string(in.remaining()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = in.f32("parameters");
    if (!std::isfinite(params[i])) {
      throw Error(ErrorCode::Format, "non-finite parameter at index " + std::to_string(i));
    }
  }
  return model;
}

void save_checkpoint(const TinyPerceiver& model, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(model));
}

TinyPerceiver load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Format) throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace toonwarp
