#include <doctest.h>

#include <cmath>
#include <cstring>

#include "test_util.hpp"
#include "toonwarp/field.hpp"
#include "toonwarp/field_io.hpp"
#include "toonwarp/image.hpp"
#include "toonwarp/visualize.hpp"
#include "toonwarp/warp.hpp"

using namespace toonwarp;
using testutil::random_field;

static ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected toonwarp::Error");
  return ErrorCode::Io;
}

TEST_CASE("zero_field") {
  const CoarseField f = zero_field(32, 32);
  CHECK(f.rows() == 32);
  CHECK(f.cols() == 32);
  for (float v : f.values()) CHECK(v == 0.0f);

  const DenseField d = upsample(zero_field(2, 2), 8, 8);
  for (double v : d.values()) CHECK(v == 0.0);

  CHECK(code_of([] { zero_field(1, 32); }) == ErrorCode::InvalidDimension);
  CHECK(code_of([] { zero_field(32, 1); }) == ErrorCode::InvalidDimension);
}

TEST_CASE("upsample preserves constants") {
  CoarseField f(5, 7);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 7; ++c) {
      f.dx(r, c) = 1.25f;
      f.dy(r, c) = -3.5f;
    }
  for (auto [h, w] : {std::pair{5, 7}, std::pair{13, 40}, std::pair{256, 256}}) {
    const DenseField d = upsample(f, h, w);
    CHECK(d.rows() == std::size_t(h));
    for (std::size_t r = 0; r < d.rows(); ++r)
      for (std::size_t c = 0; c < d.cols(); ++c) {
        CHECK(d.dx(r, c) == doctest::Approx(1.25).epsilon(1e-12));
        CHECK(d.dy(r, c) == doctest::Approx(-3.5).epsilon(1e-12));
      }
  }
}

TEST_CASE("upsample bilinear midpoint") {
  CoarseField f(2, 2);
  f.dx(1, 0) = 1.0f;
  f.dx(1, 1) = 1.0f;
  const DenseField d = upsample(f, 3, 3);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(d.dx(0, c) == 0.0);
    CHECK(d.dx(1, c) == doctest::Approx(0.5));
    CHECK(d.dx(2, c) == 1.0);
  }
}

TEST_CASE("upsample corners reproduce coarse corners") {
  const auto f = random_field<float>(3, 32, 32, 4.0);
  const DenseField d = upsample(f, 256, 256);
  CHECK(d.dx(0, 0) == doctest::Approx(f.dx(0, 0)));
  CHECK(d.dy(255, 255) == doctest::Approx(f.dy(31, 31)));
  CHECK(d.dx(0, 255) == doctest::Approx(f.dx(0, 31)));
  CHECK(d.dy(255, 0) == doctest::Approx(f.dy(31, 0)));
}

TEST_CASE("upsample is linear") {
  const auto f = random_field<double>(11, 32, 32, 3.0);
  const auto g = random_field<double>(12, 32, 32, 3.0);
  const double a = 0.7, b = -1.3;
  VectorField<double> combo(32, 32);
  for (std::size_t i = 0; i < combo.values().size(); ++i) combo.values()[i] = a * f.values()[i] + b * g.values()[i];
  const DenseField lhs = upsample(combo, 96, 80);
  const DenseField uf = upsample(f, 96, 80), ug = upsample(g, 96, 80);
  for (std::size_t i = 0; i < lhs.values().size(); ++i) {
    CHECK(std::abs(lhs.values()[i] - (a * uf.values()[i] + b * ug.values()[i])) < 1e-6);
  }
}

TEST_CASE("upsample_adjoint satisfies the inner-product identity") {
  // <upsample(c), d> == <c, upsample_adjoint(d)> for arbitrary c, d.
  const auto c = random_field<double>(21, 6, 5, 1.0);
  const auto d = random_field<double>(22, 17, 23, 1.0);
  const DenseField uc = upsample(c, 17, 23);
  const CoarseGradient ad = upsample_adjoint(d, 6, 5);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < uc.values().size(); ++i) lhs += uc.values()[i] * d.values()[i];
  for (std::size_t i = 0; i < ad.values().size(); ++i) rhs += c.values()[i] * ad.values()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("upsample rejects bad sizes") {
  CHECK(code_of([] { upsample(zero_field(4, 4), 3, 8); }) == ErrorCode::InvalidDimension);
  CHECK(code_of([] { upsample(CoarseField(1, 4), 8, 8); }) == ErrorCode::InvalidDimension);
}

TEST_CASE("scale_field") {
  const auto f = random_field<float>(5, 32, 32, 4.0);
  const auto zeroed = scale_field(f, 0.0);
  for (float v : zeroed.values()) CHECK(v == 0.0f);
  CHECK(scale_field(f, 1.0) == f);
  const auto twice = scale_field(f, 2.0);
  for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(twice.values()[i] == 2.0f * f.values()[i]);
  CHECK(code_of([&] { scale_field(f, std::nan("")); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { scale_field(f, INFINITY); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("hflip_field") {
  CoarseField f(2, 3);
  f.dx(0, 0) = 3.0f;
  f.dy(0, 0) = 1.5f;
  const CoarseField g = hflip_field(f);
  CHECK(g.dx(0, 2) == -3.0f);
  CHECK(g.dy(0, 2) == 1.5f);
  CHECK(g.dx(0, 0) == 0.0f);

  const auto r = random_field<float>(8, 32, 32, 4.0);
  CHECK(hflip_field(hflip_field(r)) == r);
}

TEST_CASE("hflip_field commutes with upsample") {
  const auto f = random_field<float>(9, 32, 32, 4.0);
  const DenseField a = upsample(hflip_field(f), 100, 90);
  const DenseField b = hflip_field(upsample(f, 100, 90));
  for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(std::abs(a.values()[i] - b.values()[i]) < 1e-9);
}

TEST_CASE("flip equivariance of warp") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image x = testutil::random_image(seed, 48, 40);
    const auto f = random_field<float>(100 + seed, 32, 32, 4.0);
    const Image lhs = warp(hflip(x), upsample(hflip_field(f), 48, 40));
    const Image rhs = hflip(warp(x, upsample(f, 48, 40)));
    CHECK(mean_abs_diff(lhs, rhs) < 1e-9);
    for (std::size_t i = 0; i < lhs.size(); ++i) REQUIRE(std::abs(lhs.values()[i] - rhs.values()[i]) < 1e-5);
  }
}

TEST_CASE("ATF1 roundtrip is bit-exact") {
  const auto f = random_field<float>(77, 32, 32, 4.0);
  const auto bytes = encode_field(f);
  CHECK(bytes.size() == kFieldHeaderBytes + 32 * 32 * 2 * 4);
  CHECK(bytes[0] == 'A');
  CHECK(bytes[3] == '1');
  // rows = 32 little-endian
  CHECK(bytes[4] == 32);
  CHECK(bytes[5] == 0);
  const CoarseField g = decode_field(bytes);
  CHECK(g == f);

  const auto path = testutil::temp_dir("field") / "f.atf";
  save_field(f, path);
  CHECK(load_field(path) == f);
}

TEST_CASE("ATF1 float32 payload is little-endian") {
  CoarseField f(2, 2);
  f.dx(0, 0) = 1.0f;  // 0x3f800000
  const auto bytes = encode_field(f);
  CHECK(bytes[12] == 0x00);
  CHECK(bytes[13] == 0x00);
  CHECK(bytes[14] == 0x80);
  CHECK(bytes[15] == 0x3f);
}

TEST_CASE("ATF1 rejects corrupt input") {
  const auto good = encode_field(random_field<float>(1, 4, 4, 1.0));

  auto bad_magic = good;
  bad_magic[3] = '2';
  try {
    decode_field(bad_magic);
    FAIL("accepted ATF2");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
    CHECK(std::string(e.what()).find("ATF2") != std::string::npos);
  }

  auto truncated = good;
  truncated.resize(good.size() - 5);
  try {
    decode_field(truncated);
    FAIL("accepted truncated payload");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
    const std::string msg = e.what();
    CHECK(msg.find(std::to_string(4 * 4 * 2 * 4)) != std::string::npos);
    CHECK(msg.find(std::to_string(4 * 4 * 2 * 4 - 5)) != std::string::npos);
  }

  auto nan_payload = good;
  const float nan = std::nanf("");
  std::memcpy(&nan_payload[kFieldHeaderBytes + 8], &nan, 4);
  CHECK(code_of([&] { decode_field(nan_payload); }) == ErrorCode::Format);

  auto tiny = std::vector<std::uint8_t>(good.begin(), good.begin() + 6);
  CHECK(code_of([&] { decode_field(tiny); }) == ErrorCode::Format);

  auto one_row = good;
  one_row[4] = 1;
  CHECK(code_of([&] { decode_field(one_row); }) == ErrorCode::Format);

  CHECK(code_of([] { load_field("/nonexistent/dir/x.atf"); }) == ErrorCode::Io);
}

TEST_CASE("visualize_field") {
  const Image white = visualize_field(upsample(zero_field(4, 4), 16, 16));
  for (double v : white.values()) CHECK(v == 1.0);

  DenseField constant(8, 8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) constant.dx(r, c) = 1.0;
  const Image uni = visualize_field(constant);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) CHECK(uni.pixel(r, c) == uni.pixel(0, 0));
  // Rightward motion is pure red on the standard wheel.
  CHECK(uni.pixel(0, 0)[0] == doctest::Approx(1.0));
  CHECK(uni.pixel(0, 0)[1] < 0.05);
}

TEST_CASE("visualize_field radial field spans the hue wheel") {
  const std::size_t n = 65, mid = 32;
  DenseField radial(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      radial.dx(r, c) = double(c) - double(mid);
      radial.dy(r, c) = double(r) - double(mid);
    }
  const Image img = visualize_field(radial);
  CHECK(img.pixel(mid, mid) == Rgb{1.0, 1.0, 1.0});

  const Rgb right = img.pixel(mid, n - 1);  // +x
  const Rgb left = img.pixel(mid, 0);       // -x
  const Rgb down = img.pixel(n - 1, mid);   // +y
  const Rgb up = img.pixel(0, mid);         // -y
  // Wheel anchors at partial saturation: +x red, -x cyan-blue, +y orange-yellow, -y violet.
  CHECK(right[0] == doctest::Approx(1.0));
  CHECK(right[1] < 0.35);
  CHECK(left[0] < 0.35);
  CHECK(left[2] == doctest::Approx(1.0));
  CHECK(down[0] == doctest::Approx(1.0));
  CHECK(down[2] < 0.35);
  CHECK(down[1] > down[2]);
  CHECK(up[2] == doctest::Approx(1.0));
  CHECK(up[1] < 0.35);
  CHECK(up[0] > up[1]);
  // The same hue appears along each ray, fainter toward the center.
  const Rgb right_half = img.pixel(mid, mid + 16);
  for (int ch = 0; ch < 3; ++ch) CHECK(right_half[ch] >= right[ch] - 1e-12);
  // Every pixel equals flow_color of its normalized displacement.
  const double max_rad = std::hypot(32.0, 32.0);
  for (std::size_t r = 0; r < n; r += 7)
    for (std::size_t c = 0; c < n; c += 5) {
      const Rgb expect = flow_color(radial.dx(r, c) / max_rad, radial.dy(r, c) / max_rad);
      for (int ch = 0; ch < 3; ++ch) CHECK(img.pixel(r, c)[ch] == doctest::Approx(expect[ch]));
    }
}
