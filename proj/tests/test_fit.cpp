#include <doctest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"
#include "toonwarp/adam.hpp"
#include "toonwarp/dataset.hpp"
#include "toonwarp/fit.hpp"
#include "toonwarp/warp.hpp"

using namespace toonwarp;

TEST_CASE("adam: zero gradient leaves params and moments untouched") {
  std::vector<double> p{1.0, -2.0, 3.0};
  const std::vector<double> g(3, 0.0);
  AdamState s(3, 0.1, 0.9, 0.999);
  adam_step(p, g, s);
  CHECK(p == std::vector<double>{1.0, -2.0, 3.0});
  CHECK(s.m == std::vector<double>(3, 0.0));
  CHECK(s.v == std::vector<double>(3, 0.0));
  CHECK(s.step == 1);
}

TEST_CASE("adam: hand-computed first two steps") {
  std::vector<double> p{0.5};
  AdamState s(1, 0.01, 0.5, 0.999);
  const std::vector<double> g1{2.0}, g2{-1.0};
  adam_step(p, g1, s);
  // m=1, v=0.004, mhat=2, vhat=4 -> step 0.01 * 2 / (2 + 1e-8)
  CHECK(p[0] == doctest::Approx(0.5 - 0.01 * 2.0 / (2.0 + 1e-8)).epsilon(1e-14));
  const double before = p[0];
  adam_step(p, g2, s);
  const double m = 0.5 * 1.0 + 0.5 * -1.0;                  // 0
  const double v = 0.999 * 0.004 + 0.001 * 1.0;             // 0.004996
  const double mhat = m / (1 - 0.25), vhat = v / (1 - 0.999 * 0.999);
  CHECK(p[0] == doctest::Approx(before - 0.01 * mhat / (std::sqrt(vhat) + 1e-8)).epsilon(1e-14));
}

TEST_CASE("adam: constant gradient steps approach lr") {
  std::vector<double> p{0.0};
  AdamState s(1, 0.05, 0.9, 0.999);
  const std::vector<double> g{0.37};
  double delta = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double before = p[0];
    adam_step(p, g, s);
    delta = before - p[0];
  }
  CHECK(delta == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("adam: float params follow the double path") {
  std::vector<double> pd{0.25, -0.5};
  std::vector<float> pf{0.25f, -0.5f};
  AdamState sd(2, 0.1, 0.9, 0.999), sf(2, 0.1, 0.9, 0.999);
  const std::vector<double> g{0.3, -0.7};
  for (int i = 0; i < 5; ++i) {
    adam_step(pd, g, sd);
    adam_step(pf, g, sf);
  }
  CHECK(pf[0] == doctest::Approx(pd[0]).epsilon(1e-6));
  CHECK(pf[1] == doctest::Approx(pd[1]).epsilon(1e-6));
}

TEST_CASE("adam: validation and decay") {
  std::vector<double> p(3);
  const std::vector<double> g(2);
  AdamState s(3, 0.1, 0.9, 0.999, 0.95);
  CHECK_THROWS_AS(adam_step(p, g, s), Error);
  CHECK_THROWS_AS(AdamState(3, 0.1, 1.0, 0.999), Error);
  CHECK_THROWS_AS(AdamState(3, 0.0, 0.9, 0.999), Error);
  for (int e = 0; e < 3; ++e) s.decay_epoch();
  CHECK(s.lr == doctest::Approx(0.1 * std::pow(0.95, 3)));
}

TEST_CASE("fit: identical images stay at zero") {
  const Image x = synth_texture(3, 64);
  FitConfig cfg;
  cfg.iterations = 50;
  const FitResult r = fit_field(x, x, cfg);
  CHECK(r.residuals.front() == 0.0);
  for (float v : r.field.values()) CHECK(std::abs(v) < 1e-6f);
}

TEST_CASE("fit: recovers a smooth field on a textured pair") {
  SynthConfig sc;
  sc.size = 128;
  const auto samples = synth_dataset(21, 1, FieldStyle::SmoothRandom, sc);
  const auto& s = samples.front();
  FitConfig cfg;
  cfg.iterations = 300;
  const FitResult r = fit_field(s.x_in, s.x_toon, cfg);
  CHECK(r.best_residual < 0.01);
  CHECK(r.best_residual <= 0.5 * r.residuals.front());
  CHECK(r.best_residual == doctest::Approx(fit_residual(s.x_in, s.x_toon, r.field)).epsilon(1e-9));
  double best = INFINITY;
  for (double v : r.residuals) best = std::min(best, v);
  CHECK(best == doctest::Approx(r.best_residual).epsilon(1e-12));
  // The fitted field beats its half-scaled version.
  CHECK(fit_residual(s.x_in, s.x_toon, scale_field(r.field, 0.5)) > r.best_residual);
}

TEST_CASE("fit: translation recovery is coordinate-honest") {
  SynthConfig sc;
  sc.size = 128;
  sc.magnitude = 3.0;
  const auto s = synth_dataset(4, 1, FieldStyle::Translation, sc).front();
  FitConfig cfg;
  cfg.iterations = 300;
  const FitResult r = fit_field(s.x_in, s.x_toon, cfg);
  double mdx = 0.0, mdy = 0.0;
  int n = 0;
  for (std::size_t i = 4; i < 28; ++i)
    for (std::size_t j = 4; j < 28; ++j) {
      mdx += r.field.dx(i, j);
      mdy += r.field.dy(i, j);
      ++n;
    }
  CHECK(std::abs(mdx / n - 3.0) < 0.5);
  CHECK(std::abs(mdy / n) < 0.3);
}

TEST_CASE("fit: deterministic and matches fit_dataset") {
  SynthConfig sc;
  sc.size = 64;
  const auto s = synth_dataset(9, 1, FieldStyle::SmoothRandom, sc).front();
  FitConfig cfg;
  cfg.iterations = 40;
  const FitResult a = fit_field(s.x_in, s.x_toon, cfg);
  const FitResult b = fit_field(s.x_in, s.x_toon, cfg);
  CHECK(a.field == b.field);
  CHECK(a.residuals == b.residuals);

  const std::vector<std::pair<Image, Image>> one{{s.x_in, s.x_toon}};
  CHECK(fit_dataset(one, cfg).front().field == a.field);
  const std::vector<std::pair<Image, Image>> twice{{s.x_in, s.x_toon}, {s.x_in, s.x_toon}};
  const auto both = fit_dataset(twice, cfg);
  CHECK(both[0].field == both[1].field);
}

TEST_CASE("fit: errors") {
  const Image a(64, 64), b(64, 65);
  try {
    fit_field(a, b);
    FAIL("accepted mismatched sizes");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }

  Image bad = synth_texture(1, 64);
  bad.at(10, 10, 1) = std::nan("");
  try {
    fit_field(bad, synth_texture(2, 64));
    FAIL("accepted NaN input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericFailure);
    CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
  }

  const std::vector<std::pair<Image, Image>> pairs{{a, a}, {a, b}};
  try {
    fit_dataset(pairs);
    FAIL("accepted bad pair");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("pair 1") != std::string::npos);
  }

  FitConfig cfg;
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.iterations = 10;
  cfg.lr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("fit: residual CSV") {
  const auto path = testutil::temp_dir("fitcsv") / "r.csv";
  write_residual_csv(path, std::vector<double>{0.5, 0.25});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,residual");
  std::getline(in, line);
  CHECK(line.rfind("0,0.5", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("1,0.25", 0) == 0);
}
