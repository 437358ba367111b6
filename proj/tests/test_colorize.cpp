#include <doctest.h>

#include <random>

#include "artup/colorize.hpp"
#include "artup/imageprep.hpp"

using namespace artup;

namespace {

bool between(int v, int a, int b) { return v >= std::min(a, b) && v <= std::max(a, b); }

}  // namespace

TEST_CASE("blend endpoints") {
  Rgb c{120, 30, 200};
  CHECK(color::blend_pixel(c, imageprep::luma(c), true) == c);
  CHECK(color::blend_pixel(c, imageprep::luma(c), false) == c);
  CHECK(color::blend_pixel(c, 255, true) == Rgb{255, 255, 255});
  CHECK(color::blend_pixel(c, 0, false) == Rgb{0, 0, 0});
}

TEST_CASE("singular pixels already at the extreme") {
  Rgb white{255, 255, 255}, black{0, 0, 0};
  double raw = -1;
  CHECK(color::blend_pixel(white, 255, true, &raw) == white);
  CHECK(raw == 1.0);
  CHECK(color::blend_pixel(white, 180, true) == white);
  CHECK(color::blend_pixel(black, 0, false) == black);
  CHECK(color::blend_pixel(black, 90, false) == black);
}

TEST_CASE("luminance fidelity and hue preservation on random pixels") {
  std::mt19937 rng(6);
  int unclamped = 0, within = 0;
  for (int trial = 0; trial < 200000; ++trial) {
    Rgb c{std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
    bool light = rng() & 1U;
    int target = int(rng() % 256);
    double raw = 0;
    Rgb out = color::blend_pixel(c, target, light, &raw);
    int ext = light ? 255 : 0;
    REQUIRE(between(out.r, c.r, ext));
    REQUIRE(between(out.g, c.g, ext));
    REQUIRE(between(out.b, c.b, ext));
    if (raw < 0 || raw > 1) continue;
    ++unclamped;
    if (std::abs(int(imageprep::luma(out)) - target) <= 1) ++within;
  }
  CHECK(unclamped > 50000);
  CHECK(within == unclamped);
}

TEST_CASE("canvas colorization") {
  prob::CanvasLayout layout{3, 4, 1};
  const int n = layout.canvas_px();
  auto image = PixelGrid::rgb(n, n, 255);
  std::vector<std::uint8_t> light{1, 0, 1, 0, 1, 0, 1, 0, 1};
  auto qg = PixelGrid::gray(n, n, 255);
  for (int y = 4; y < 16; ++y)
    for (int x = 4; x < 16; ++x) {
      image.set_rgb(x, y, {100, 150, 50});
      bool l = light[std::size_t((y - 4) / 4) * 3 + (x - 4) / 4];
      qg.at(x, y) = l ? 200 : 40;
    }
  auto res = color::colorize(image, qg, light, layout);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      REQUIRE(std::abs(int(imageprep::luma(res.qc.rgb_at(x, y))) - int(qg.at(x, y))) <= 1);
      REQUIRE(res.clamped(x, y) == 0);
    }
  CHECK(res.qc.rgb_at(0, 0) == Rgb{255, 255, 255});
  CHECK(res.singular == n * n - 144);
  CHECK(res.clamped_low + res.clamped_high == 0);

  // A light module asked to go darker than its source clamps at the source.
  qg.at(4, 4) = 10;
  auto res2 = color::colorize(image, qg, light, layout);
  CHECK(res2.clamped_low == 1);
  CHECK(res2.qc.rgb_at(4, 4) == Rgb{100, 150, 50});

  CHECK_THROWS_AS(color::colorize(image, PixelGrid::gray(3, 3), light, layout), Error);
}
