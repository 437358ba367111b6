#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "artup/image.hpp"

namespace artup::imageprep {

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// Luminance of one RGB triple, rounded and clamped to 0..255.
std::uint8_t luma(Rgb c);
/// Exact (unrounded) luminance.
double luma_exact(Rgb c);

/// Gray copy of an RGB image; gray input is returned unchanged.
PixelGrid to_grayscale(const PixelGrid& image);

/// a x a Gaussian weights (sigma1 = (a - 1) / 5) evaluated at pixel centers and
/// normalized to sum to 1. For a = 1 the single weight is 1.
std::vector<double> module_weights(int a);

/// Per-module binarization of an (a*side) square gray image. Result is side x side with
/// 1 = light: the Gaussian-weighted module mean is at least 127.5.
/// Throws Error(DimensionMismatch) when the image is not an a*side square.
Grid<std::uint8_t> module_binarize(const PixelGrid& gray, int side);

struct PriorityWeights {
  double edge = 0.67;
  double saliency = 0.23;
  double heuristic = 0.10;
};

/// Module-level maps, each side x side with values in [0, 1].
struct PriorityMap {
  Grid<double> edge;
  Grid<double> saliency;
  Grid<double> heuristic;
  Grid<double> w;
};

/// Center preference at module coordinates (x, y): 1 - ((x - l/2)^2 + (y - l/2)^2) / (l^2 / 2),
/// clamped at 0.
double heuristic(double x, double y, int side);

/// Per-pixel Canny edges (1 = edge) after a sigma 1.4 blur, hysteresis 50/150.
Grid<double> canny_edges(const PixelGrid& image);
/// Canny edge density (blur sigma 1.4, hysteresis 50/150) mean-pooled per module.
Grid<double> edge_map(const PixelGrid& image, int side);
/// Global histogram-contrast saliency per pixel (12 levels per channel, Lab distance),
/// scaled to [0, 1].
Grid<double> pixel_saliency(const PixelGrid& image);
Grid<double> saliency_map(const PixelGrid& image, int side);

/// Mean of each a x a block of a per-pixel map.
Grid<double> mean_pool(const Grid<double>& pixels, int side);

PriorityMap priority_map(const PixelGrid& image, int side, const PriorityWeights& lambda = {});
/// Recombines precomputed components.
Grid<double> combine(const Grid<double>& edge, const Grid<double>& saliency,
                     const Grid<double>& heuristic, const PriorityWeights& lambda = {});

}  // namespace artup::imageprep
