#include "artup/colorize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "artup/imageprep.hpp"

namespace artup::color {

namespace {

std::uint8_t to_byte(double v) { return std::uint8_t(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

Rgb blend_pixel(Rgb original, double target_luma, bool light, double* raw_theta) {
  const double li = imageprep::luma_exact(original);
  const double lc = light ? 255.0 : 0.0;
  double theta;
  double raw;
  if (std::abs(lc - li) < 1e-9) {
    raw = std::abs(target_luma - lc) <= 0.5 ? 1.0 : 0.0;
    theta = raw;
  } else if (target_luma == double(imageprep::luma(original))) {
    raw = theta = 0.0;
  } else {
    raw = (target_luma - li) / (lc - li);
    theta = std::clamp(raw, 0.0, 1.0);
  }
  if (raw_theta) *raw_theta = raw;
  return Rgb{to_byte(original.r + theta * (lc - original.r)), to_byte(original.g + theta * (lc - original.g)),
             to_byte(original.b + theta * (lc - original.b))};
}

ColorizeResult colorize(const PixelGrid& image, const PixelGrid& qg, std::span<const std::uint8_t> light,
                        const prob::CanvasLayout& layout) {
  const int n = layout.canvas_px();
  if (image.width() != n || image.height() != n || qg.width() != n || qg.height() != n || !qg.is_gray() ||
      light.size() != std::size_t(layout.side) * layout.side)
    throw Error(ErrorCode::DimensionMismatch, "colorize inputs disagree in size");

  const PixelGrid rgb = to_rgb(image);
  ColorizeResult res;
  res.qc = PixelGrid::rgb(n, n);
  res.theta = Grid<double>(n, n);
  res.clamped = Grid<std::uint8_t>(n, n, 0);
  const int o = layout.origin_px(), s = layout.symbol_px(), a = layout.a;

  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      bool inside = x >= o && y >= o && x < o + s && y < o + s;
      bool is_light = !inside || light[std::size_t((y - o) / a) * layout.side + (x - o) / a];
      Rgb src = rgb.rgb_at(x, y);
      double raw = 0;
      Rgb out = blend_pixel(src, qg.at(x, y), is_light, &raw);
      double li = imageprep::luma_exact(src);
      if (std::abs((is_light ? 255.0 : 0.0) - li) < 1e-9) ++res.singular;
      if (raw < 0) {
        ++res.clamped_low;
        res.clamped(x, y) = 1;
      } else if (raw > 1) {
        ++res.clamped_high;
        res.clamped(x, y) = 1;
      }
      res.theta(x, y) = std::clamp(raw, 0.0, 1.0);
      res.qc.set_rgb(x, y, out);
    }
  return res;
}

}  // namespace artup::color
