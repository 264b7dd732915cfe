#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "test_util.hpp"
#include "toonwarp/dataset.hpp"
#include "toonwarp/field_io.hpp"
#include "toonwarp/png_io.hpp"
#include "toonwarp/warp.hpp"

using namespace toonwarp;
namespace fs = std::filesystem;

TEST_CASE("PNG roundtrip preserves 8-bit values") {
  Image img(7, 5);
  std::size_t k = 0;
  for (double& v : img.values()) v = double((k++ * 37) % 256) / 255.0;
  const auto path = testutil::temp_dir("png") / "a.png";
  write_png(path, img);
  const Image back = read_png(path);
  CHECK(back == img);

  Image off(2, 2, 0.5);
  write_png(path, off);
  const Image half = read_png(path);
  for (double v : half.values()) CHECK(v == 128.0 / 255.0);
  CHECK(quantize_8bit(0.5) == 128.0 / 255.0);
  CHECK(quantize_8bit(-3.0) == 0.0);
  CHECK(quantize_8bit(7.0) == 1.0);

  CHECK_THROWS_AS(read_png(path.parent_path() / "missing.png"), Error);
}

TEST_CASE("synthetic samples reconstruct exactly") {
  for (FieldStyle style : {FieldStyle::SmoothRandom, FieldStyle::Bulge, FieldStyle::Translation}) {
    SynthConfig cfg;
    cfg.size = 64;
    const auto samples = synth_dataset(2, 3, style, cfg);
    REQUIRE(samples.size() == 3);
    for (const auto& s : samples) {
      REQUIRE(s.field);
      CHECK(s.x_in.height() == 64);
      CHECK(s.x_toon.same_shape(s.x_in));
      CHECK(warp(s.x_in, upsample(*s.field, 64, 64)) == s.x_toon);
      double inf = 0.0;
      for (float v : s.field->values()) inf = std::max(inf, double(std::abs(v)));
      CHECK(inf <= 4.0 + 1e-6);
    }
  }
}

TEST_CASE("synth ids and prefix stability") {
  SynthConfig cfg;
  cfg.size = 64;
  const auto three = synth_dataset(9, 3, FieldStyle::SmoothRandom, cfg);
  const auto five = synth_dataset(9, 5, FieldStyle::SmoothRandom, cfg);
  CHECK(three[0].id == "synth_000");
  CHECK(five[4].id == "synth_004");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(three[i].x_in == five[i].x_in);
    CHECK(*three[i].field == *five[i].field);
  }
  CHECK_FALSE(three[0].x_in == three[1].x_in);
}

TEST_CASE("translation style") {
  SynthConfig cfg;
  cfg.size = 64;
  cfg.magnitude = 3.0;
  const auto s = synth_dataset(1, 1, FieldStyle::Translation, cfg).front();
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) {
      CHECK(s.field->dx(r, c) == 3.0f);
      CHECK(s.field->dy(r, c) == 0.0f);
    }
}

TEST_CASE("bulge field is symmetric about the center") {
  const CoarseField f = bulge_field(32, 256, 3.5);
  const std::size_t n = 32;
  double peak = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t mr = n - 1 - r, mc = n - 1 - c;
      CHECK(std::abs(f.dx(r, c) + f.dx(r, mc)) < 1e-6);
      CHECK(std::abs(f.dy(r, c) - f.dy(r, mc)) < 1e-6);
      CHECK(std::abs(f.dy(r, c) + f.dy(mr, c)) < 1e-6);
      CHECK(std::abs(f.dx(r, c) - f.dx(mr, c)) < 1e-6);
      CHECK(std::abs(f.dx(r, c) - f.dy(c, r)) < 1e-6);
      peak = std::max(peak, double(std::abs(f.dx(r, c))));
    }
  CHECK(peak <= 3.5 + 1e-6);
  CHECK(peak > 1.0);
}

TEST_CASE("field styles parse") {
  CHECK(parse_field_style("smooth-random") == FieldStyle::SmoothRandom);
  CHECK(parse_field_style("bulge") == FieldStyle::Bulge);
  CHECK(parse_field_style("translation") == FieldStyle::Translation);
  CHECK(field_style_name(FieldStyle::Bulge) == "bulge");
  try {
    parse_field_style("swirl");
    FAIL("accepted unknown style");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("load_dataset") {
  const fs::path root = testutil::temp_dir("dataset");
  CHECK(load_dataset(root).empty());

  SynthConfig cfg;
  cfg.size = 64;
  const auto samples = synth_dataset(3, 2, FieldStyle::SmoothRandom, cfg);
  for (const auto& s : samples) write_sample(root, s);
  const auto loaded = load_dataset(root, 64);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "synth_000");
  CHECK(loaded[0].x_in == samples[0].x_in);  // already 8-bit quantized
  CHECK(*loaded[1].field == *samples[1].field);

  const auto resized = load_dataset(root, 32);
  CHECK(resized[0].x_in.height() == 32);
  CHECK(resized[0].x_toon.width() == 32);

  fs::remove(root / "synth_001" / "field.atf");
  CHECK_FALSE(load_dataset(root, 64)[1].field.has_value());

  fs::remove(root / "synth_001" / "toon.png");
  try {
    load_dataset(root, 64);
    FAIL("missing toon accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Dataset);
    CHECK(std::string(e.what()).find("synth_001") != std::string::npos);
  }

  try {
    load_dataset(root / "nope");
    FAIL("missing root accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Dataset);
  }
}

TEST_CASE("split") {
  DatasetManifest m;
  for (int i = 0; i < 101; ++i) m.ids.push_back("s" + std::to_string(i));
  const auto [train, val] = split(m, 90.0 / 101.0, 42);
  CHECK(train.ids.size() == 90);
  CHECK(val.ids.size() == 11);
  CHECK(train.split == "train");
  CHECK(val.split == "val");

  std::set<std::string> all(train.ids.begin(), train.ids.end());
  for (const auto& id : val.ids) CHECK(all.insert(id).second);
  CHECK(all == std::set<std::string>(m.ids.begin(), m.ids.end()));

  const auto again = split(m, 90.0 / 101.0, 42);
  CHECK(again.first.ids == train.ids);
  CHECK_FALSE(split(m, 90.0 / 101.0, 43).first.ids == train.ids);

  DatasetManifest two;
  two.ids = {"a", "b"};
  CHECK_THROWS_AS(split(two, 0.1, 0), Error);
  CHECK_THROWS_AS(split(m, 1.0, 0), Error);
  CHECK_THROWS_AS(split(m, 0.0, 0), Error);
}

TEST_CASE("manifest roundtrip") {
  DatasetManifest m;
  m.ids = {"a", "b", "c", "d"};
  const auto [train, val] = split(m, 0.5, 1);
  const auto path = testutil::temp_dir("manifest") / "manifest.txt";
  write_manifest(path, {train, val});
  const auto rows = read_manifest(path);
  REQUIRE(rows.size() == 4);
  for (const auto& [id, tag] : rows) {
    const bool in_train = std::find(train.ids.begin(), train.ids.end(), id) != train.ids.end();
    CHECK(tag == (in_train ? "train" : "val"));
  }
}
