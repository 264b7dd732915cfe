#include "toonwarp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "toonwarp/error.hpp"
#include "toonwarp/field_io.hpp"
#include "toonwarp/png_io.hpp"

namespace fs = std::filesystem;

namespace toonwarp {

std::vector<PairedSample> load_dataset(const fs::path& root, std::size_t dense_size) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::Dataset, "dataset root " + root.string() + " is not a directory");
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<PairedSample> samples;
  samples.reserve(dirs.size());
  for (const fs::path& dir : dirs) {
    PairedSample s;
    s.id = dir.filename().string();
    for (const char* name : {"input.png", "toon.png"}) {
      if (!fs::exists(dir / name)) {
        throw Error(ErrorCode::Dataset, "sample '" + s.id + "' is missing " + name);
      }
    }
    s.x_in = resize_bilinear(read_png(dir / "input.png"), dense_size, dense_size);
    s.x_toon = resize_bilinear(read_png(dir / "toon.png"), dense_size, dense_size);
    if (fs::exists(dir / "field.atf")) s.field = load_field(dir / "field.atf");
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_sample(const fs::path& root, const PairedSample& sample) {
  const fs::path dir = root / sample.id;
  fs::create_directories(dir);
  write_png(dir / "input.png", sample.x_in);
  write_png(dir / "toon.png", sample.x_toon);
  if (sample.field) save_field(*sample.field, dir / "field.atf");
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest, double train_fraction,
                                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie strictly between 0 and 1");
  }
  const std::set<std::string> unique(manifest.ids.begin(), manifest.ids.end());
  if (unique.size() != manifest.ids.size()) throw Error(ErrorCode::InvalidArgument, "manifest ids are not unique");

  const std::size_t n = manifest.ids.size();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  if (n_train == 0 || n_train >= n) {
    throw Error(ErrorCode::InvalidArgument, "split of " + std::to_string(n) + " samples at fraction " +
                                                std::to_string(train_fraction) + " leaves one side empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  DatasetManifest train{manifest.root, {}, "train", manifest.dense_size};
  DatasetManifest val{manifest.root, {}, "val", manifest.dense_size};
  for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : val).ids.push_back(manifest.ids[order[i]]);
  return {train, val};
}

void write_manifest(const fs::path& path, const std::vector<DatasetManifest>& parts) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& part : parts) {
    for (const auto& id : part.ids) out << id << ',' << part.split << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == line.size()) {
      throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) + ": expected 'id,split'");
    }
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return rows;
}

}  // namespace toonwarp
