#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "artup/image.hpp"

namespace artup::prob {

/// Intended appearance of a module. Light modules want the binarizer output H = 1.
enum class Tone : std::uint8_t { Dark, Light };

inline constexpr double kDefaultSigma2 = 255.0 / 3.0;

/// P(H = 1) and P(H = 0) for gray Y under a Gaussian threshold centered at t,
/// truncated to the gray range [0, 255].
double light_mass(double y, double t, double sigma2 = kDefaultSigma2);
double dark_mass(double y, double t, double sigma2 = kDefaultSigma2);

/// Normalized probability that pixel gray `y` binarizes to `tone` given expected threshold `t`.
double threshold_success_prob(double y, double t, Tone tone, double sigma2 = kDefaultSigma2);

/// Gray level reaching at least `target` with the smallest move away from the dark
/// (for Light) or light (for Dark) extreme. The forward map is monotone in `y`, so the
/// result is the closest gray to any start value that already falls short of `target`.
std::uint8_t invert_threshold_prob(double target, double t, Tone tone, double sigma2 = kDefaultSigma2);

/// Mean of `gray` over the window x - floor(w/2) .. x - floor(w/2) + w - 1 in each axis,
/// clipped to the image. Uses an integral image.
Grid<double> expected_threshold(const PixelGrid& gray, int window);
/// Direct double-loop reference of the same quantity.
Grid<double> expected_threshold_naive(const PixelGrid& gray, int window);

/// a x a sampling probabilities: Gaussian with the given sigma about the module center,
/// evaluated at pixel centers and renormalized to sum to 1. sigma3 <= 0 selects a / 6.
std::vector<double> sampling_prob_grid(int a, double sigma3 = 0.0);

/// Sum of ps * pt over a module. Throws Error(DimensionMismatch) on size mismatch.
double module_success_prob(std::span<const double> ps, std::span<const double> pt);

/// Placement of a module grid on a pixel canvas with a quiet zone.
struct CanvasLayout {
  int side = 0;   // modules per row
  int a = 0;      // pixels per module
  int quiet = 4;  // quiet-zone width in modules

  int canvas_px() const { return (side + 2 * quiet) * a; }
  int origin_px() const { return quiet * a; }
  int symbol_px() const { return side * a; }
};

/// Per-module success probability of a gray canvas, recomputed from scratch:
/// thresholds from the 3a window, threshold and sampling models per pixel.
/// `tones` holds one entry per module (row-major).
Grid<double> module_probabilities(const PixelGrid& canvas, const CanvasLayout& layout,
                                  std::span<const Tone> tones, double sigma2 = kDefaultSigma2,
                                  double sigma3 = 0.0);

}  // namespace artup::prob
