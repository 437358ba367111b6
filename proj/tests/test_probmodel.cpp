#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "artup/probmodel.hpp"

using namespace artup;
using prob::Tone;

namespace {

// Composite Simpson integral of the untruncated threshold density over [lo, hi].
double density_integral(double lo, double hi, double t, double sigma) {
  if (hi <= lo) return 0.0;
  const int n = 4000;
  const double h = (hi - lo) / n;
  auto f = [&](double x) { return std::exp(-(x - t) * (x - t) / (2 * sigma * sigma)) / (std::sqrt(2 * M_PI) * sigma); };
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

PixelGrid random_gray(int w, int h, std::mt19937& rng) {
  auto g = PixelGrid::gray(w, h);
  for (auto& b : g.bytes()) b = std::uint8_t(rng());
  return g;
}

}  // namespace

TEST_CASE("threshold probability basics") {
  CHECK(prob::threshold_success_prob(127.5, 127.5, Tone::Light) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(prob::threshold_success_prob(255, 127.5, Tone::Light) > 0.99);
  CHECK(prob::threshold_success_prob(255, 127.5, Tone::Light) == 1.0);
  CHECK(prob::threshold_success_prob(0, 127.5, Tone::Dark) == 1.0);
  CHECK(prob::threshold_success_prob(0, 127.5, Tone::Light) == 0.0);
  CHECK_THROWS_AS(prob::threshold_success_prob(10, 10, Tone::Light, 0.0), Error);
}

TEST_CASE("threshold probability matches numeric quadrature") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0, 255);
  for (double sigma : {255.0 / 3, 30.0, 120.0})
    for (int trial = 0; trial < 50; ++trial) {
      double y = u(rng), t = u(rng);
      double p1 = density_integral(0, y, t, sigma), p0 = density_integral(y, 255, t, sigma);
      REQUIRE(prob::light_mass(y, t, sigma) == doctest::Approx(p1).epsilon(1e-9));
      REQUIRE(prob::dark_mass(y, t, sigma) == doctest::Approx(p0).epsilon(1e-9));
      REQUIRE(std::abs(prob::threshold_success_prob(y, t, Tone::Light, sigma) - p1 / (p0 + p1)) < 1e-9);
      REQUIRE(std::abs(prob::threshold_success_prob(y, t, Tone::Dark, sigma) - p0 / (p0 + p1)) < 1e-9);
    }
}

TEST_CASE("normalization, monotonicity and symmetry over the full table") {
  for (int t = 0; t <= 255; ++t) {
    double prev = -1;
    for (int y = 0; y <= 255; ++y) {
      double l = prob::threshold_success_prob(y, t, Tone::Light);
      double d = prob::threshold_success_prob(y, t, Tone::Dark);
      REQUIRE(l >= 0.0);
      REQUIRE(l <= 1.0);
      REQUIRE(std::abs(l + d - 1.0) < 1e-12);
      REQUIRE(l >= prev);
      prev = l;
      REQUIRE(std::abs(l - prob::threshold_success_prob(255 - y, 255 - t, Tone::Dark)) < 1e-9);
    }
  }
}

TEST_CASE("inversion") {
  SUBCASE("forward then inverse is the identity") {
    for (double t : {0.0, 40.5, 127.5, 200.0, 255.0})
      for (int y = 0; y <= 255; ++y) {
        REQUIRE(prob::invert_threshold_prob(prob::threshold_success_prob(y, t, Tone::Light), t, Tone::Light) == y);
        REQUIRE(prob::invert_threshold_prob(prob::threshold_success_prob(y, t, Tone::Dark), t, Tone::Dark) == y);
      }
  }
  SUBCASE("boundaries") {
    CHECK(prob::invert_threshold_prob(1.0, 127.5, Tone::Light) == 255);
    CHECK(prob::invert_threshold_prob(1.0, 127.5, Tone::Dark) == 0);
    CHECK(prob::invert_threshold_prob(0.0, 127.5, Tone::Light) == 0);
    CHECK(prob::invert_threshold_prob(0.0, 127.5, Tone::Dark) == 255);
  }
  SUBCASE("half probability at the symmetric threshold") {
    // Exhaustive scan oracle for the nearest gray.
    int best = 0;
    for (int y = 0; y <= 255; ++y)
      if (std::abs(prob::threshold_success_prob(y, 127.5, Tone::Light) - 0.5) <
          std::abs(prob::threshold_success_prob(best, 127.5, Tone::Light) - 0.5))
        best = y;
    CHECK((best == 127 || best == 128));
    int got = prob::invert_threshold_prob(0.5, 127.5, Tone::Light);
    CHECK((got == 127 || got == 128));
  }
  SUBCASE("result never falls short and is the tightest such gray") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1), tu(0, 255);
    for (int trial = 0; trial < 2000; ++trial) {
      double target = u(rng), t = tu(rng);
      int y = prob::invert_threshold_prob(target, t, Tone::Light);
      REQUIRE(prob::threshold_success_prob(y, t, Tone::Light) >= target);
      if (y > 0) REQUIRE(prob::threshold_success_prob(y - 1, t, Tone::Light) < target);
      int yd = prob::invert_threshold_prob(target, t, Tone::Dark);
      REQUIRE(prob::threshold_success_prob(yd, t, Tone::Dark) >= target);
      if (yd < 255) REQUIRE(prob::threshold_success_prob(yd + 1, t, Tone::Dark) < target);
    }
  }
}

TEST_CASE("expected threshold") {
  SUBCASE("uniform image") {
    auto g = PixelGrid::gray(30, 20, 77);
    for (double v : prob::expected_threshold(g, 9).values()) CHECK(v == 77.0);
  }
  SUBCASE("checkerboard interior averages to 127.5") {
    auto g = PixelGrid::gray(40, 40);
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x) g.at(x, y) = (x + y) % 2 ? 255 : 0;
    auto l = prob::expected_threshold(g, 6);
    for (int y = 3; y < 37; ++y)
      for (int x = 3; x < 37; ++x) REQUIRE(l(x, y) == 127.5);
  }
  SUBCASE("integral image equals the naive loop, including clipped corners") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
      int w = 1 + int(rng() % 60), h = 1 + int(rng() % 60), win = 1 + int(rng() % 30);
      auto g = random_gray(w, h, rng);
      REQUIRE(prob::expected_threshold(g, win) == prob::expected_threshold_naive(g, win));
    }
    auto g = random_gray(50, 50, rng);
    auto l = prob::expected_threshold(g, 9);
    double corner = 0;
    for (int y = 0; y <= 4; ++y)
      for (int x = 0; x <= 4; ++x) corner += g.at(x, y);
    CHECK(l(0, 0) == doctest::Approx(corner / 25));
  }
}

TEST_CASE("sampling grid") {
  CHECK(prob::sampling_prob_grid(1) == std::vector<double>{1.0});
  for (int a = 1; a <= 40; ++a) {
    auto p = prob::sampling_prob_grid(a);
    double sum = 0;
    for (double v : p) sum += v;
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
    double peak = *std::max_element(p.begin(), p.end());
    int lo = (a - 1) / 2, hi = a / 2;
    REQUIRE(p[std::size_t(lo) * a + lo] == doctest::Approx(peak));
    REQUIRE(p[std::size_t(hi) * a + hi] == doctest::Approx(peak));
  }
  auto wide = prob::sampling_prob_grid(8, 100.0);
  CHECK(wide.front() == doctest::Approx(1.0 / 64).epsilon(1e-3));
}

TEST_CASE("module success probability") {
  auto ps = prob::sampling_prob_grid(7);
  std::vector<double> ones(ps.size(), 1.0), threes(ps.size(), 0.75);
  CHECK(prob::module_success_prob(ps, ones) == doctest::Approx(1.0));
  CHECK(prob::module_success_prob(ps, threes) == doctest::Approx(0.75));

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pt(ps.size());
    for (auto& v : pt) v = u(rng);
    double naive = 0;
    for (int j = 0; j < 7; ++j)
      for (int i = 0; i < 7; ++i) naive += ps[std::size_t(j) * 7 + i] * pt[std::size_t(j) * 7 + i];
    double p = prob::module_success_prob(ps, pt);
    REQUIRE(p == doctest::Approx(naive));
    REQUIRE(p >= *std::min_element(pt.begin(), pt.end()) - 1e-12);
    REQUIRE(p <= *std::max_element(pt.begin(), pt.end()) + 1e-12);
  }
  CHECK_THROWS_AS(prob::module_success_prob(ps, std::vector<double>(3)), Error);
}

TEST_CASE("module probabilities of a pure black/white canvas are high") {
  prob::CanvasLayout layout{5, 6, 2};
  auto canvas = PixelGrid::gray(layout.canvas_px(), layout.canvas_px(), 255);
  std::vector<Tone> tones(25, Tone::Light);
  for (int my = 0; my < 5; ++my)
    for (int mx = 0; mx < 5; ++mx)
      if ((mx + my) % 2) {
        tones[std::size_t(my) * 5 + mx] = Tone::Dark;
        for (int j = 0; j < 6; ++j)
          for (int i = 0; i < 6; ++i) canvas.at(12 + mx * 6 + i, 12 + my * 6 + j) = 0;
      }
  auto p = prob::module_probabilities(canvas, layout, tones);
  for (double v : p.values()) CHECK(v > 0.8);
  CHECK_THROWS_AS(prob::module_probabilities(PixelGrid::gray(10, 10), layout, tones), Error);
}
