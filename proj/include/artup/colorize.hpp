#pragma once

#include <cstdint>
#include <span>

#include "artup/image.hpp"
#include "artup/probmodel.hpp"

namespace artup::color {

struct ColorizeResult {
  PixelGrid qc;                // RGB canvas
  Grid<double> theta;          // interpolation weight actually used, in [0, 1]
  Grid<std::uint8_t> clamped;  // 1 where the raw weight fell outside [0, 1]
  int clamped_low = 0;
  int clamped_high = 0;
  int singular = 0;  // pixels already at the module's extreme luminance
};

/// Pulls each pixel of `image` (RGB canvas) along the line toward its module's extreme
/// color (white for light modules, black for dark) until its luminance equals `qg`.
/// `light` has one entry per module; pixels outside the symbol use white.
ColorizeResult colorize(const PixelGrid& image, const PixelGrid& qg, std::span<const std::uint8_t> light,
                        const prob::CanvasLayout& layout);

/// Single-pixel form: returns the interpolated color and the raw (unclamped) weight.
Rgb blend_pixel(Rgb original, double target_luma, bool light, double* raw_theta = nullptr);

}  // namespace artup::color
