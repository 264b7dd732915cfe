#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toonwarp/field.hpp"
#include "toonwarp/image.hpp"

namespace toonwarp {

struct PairedSample {
  Image x_in;
  Image x_toon;
  std::optional<CoarseField> field;  // ground-truth coarse warp
  std::string id;
};

/// Reads `root/<id>/input.png`, `root/<id>/toon.png` and the optional
/// `root/<id>/field.atf` for every subdirectory, sorted by id. Images are
/// resized to dense_size x dense_size.
std::vector<PairedSample> load_dataset(const std::filesystem::path& root, std::size_t dense_size = kDefaultDenseSize);

/// Inverse of load_dataset for a single sample.
void write_sample(const std::filesystem::path& root, const PairedSample& sample);

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<std::string> ids;
  std::string split = "train";
  std::size_t dense_size = kDefaultDenseSize;
};

/// Seeded shuffle, then the first round(n * train_fraction) ids go to train.
/// Each side keeps the original id order.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest, double train_fraction,
                                                  std::uint64_t seed);

/// Plain-text listing, one `id,split` per line.
void write_manifest(const std::filesystem::path& path, const std::vector<DatasetManifest>& parts);
std::vector<std::pair<std::string, std::string>> read_manifest(const std::filesystem::path& path);

enum class FieldStyle { SmoothRandom, Bulge, Translation };

FieldStyle parse_field_style(std::string_view name);
std::string_view field_style_name(FieldStyle style);

struct SynthConfig {
  std::size_t size = kDefaultDenseSize;
  std::size_t grid = kCoarseSize;
  // Upper bound on |dx|, |dy| in pixels; exact offset for Translation.
  double magnitude = 4.0;
  // Noise amplitude inside the face ellipse relative to the background:
  // 1 textures the whole image, 0 leaves smooth skin with only the facial
  // features and the face outline carrying detail.
  double skin_texture = 1.0;
};

/// Procedural pairs: textured face-like inputs, a ground-truth coarse field
/// of the requested style, and x_toon = warp(x_in, upsample(field)). Sample i
/// depends only on (seed, i), so growing n keeps earlier samples unchanged.
std::vector<PairedSample> synth_dataset(std::uint64_t seed, std::size_t n, FieldStyle style,
                                        const SynthConfig& cfg = {});

/// The procedural input image alone.
Image synth_texture(std::uint64_t seed, std::size_t size, double skin_texture = 1.0);

/// Ground-truth generators, exposed for tests.
CoarseField translation_field(std::size_t grid, double dx, double dy);
CoarseField bulge_field(std::size_t grid, std::size_t dense_size, double peak);
CoarseField smooth_random_field(std::uint64_t seed, std::size_t grid, double max_component);

}  // namespace toonwarp
