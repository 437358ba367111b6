#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "artup/image.hpp"
#include "artup/probmodel.hpp"

namespace artup::lum {

struct ModifyResult {
  double initial_prob = 0;  // P before modification
  double final_prob = 0;    // P from the internal p^t bookkeeping
  bool exhausted = false;   // the weight budget ran out below eta
  int changed = 0;          // pixels given a new gray
};

/// Luminance modification of one module (a x a, row-major spans). `y` is updated in place;
/// only pixels whose threshold probability had to rise are rewritten. `varpi` is consumed.
ModifyResult modify_module(std::span<std::uint8_t> y, std::span<const double> t, std::span<const double> ps,
                           std::span<double> varpi, double eta, prob::Tone tone,
                           double sigma2 = prob::kDefaultSigma2);

enum class VarpiPreset { Gaussian, Constant, Random, Image, Center, GaussianEdge };

VarpiPreset parse_varpi_preset(std::string_view name);
std::string to_string(VarpiPreset preset);

struct VarpiOptions {
  VarpiPreset preset = VarpiPreset::Gaussian;
  std::uint64_t seed = 0;
  std::filesystem::path mask_image;  // for VarpiPreset::Image
  double sigma3 = 0;                 // <= 0 means a / 6
};

/// Per-pixel adjustment weights over the symbol area (side*a square).
/// `image` is the resampled input, used by the edge preset.
Grid<double> make_varpi(const VarpiOptions& options, int side, int a, const PixelGrid& image);

/// eta_k = 0.75 + 0.15 (1 - W_k).
Grid<double> eta_from_priority(const Grid<double>& w);
Grid<double> eta_constant(int side, double eta);

struct LuminanceConfig {
  double sigma2 = prob::kDefaultSigma2;
  double sigma3 = 0;  // <= 0 means a / 6
  int quiet = 4;
  double tolerance = 1.0;
  int max_iterations = 50;
  /// Extra passes after convergence that re-run the module update from the current grays
  /// against freshly recomputed thresholds, for modules that slipped below eta.
  int settle_passes = 20;
};

struct IterationLog {
  int iteration = 0;
  double changed_fraction = 0;  // data pixels whose gray differs from the previous pass
  double max_delta_threshold = 0;
  double mean_module_prob = 0;
  int modules_below_eta = 0;
};

struct LuminanceResult {
  PixelGrid qg;                  // gray canvas including the quiet zone
  Grid<double> thresholds;       // expected threshold map of qg
  Grid<double> module_prob;      // recomputed from qg
  Grid<std::uint8_t> exhausted;  // 1 where the weight budget ran out
  std::vector<IterationLog> log;
  int iterations = 0;
  bool converged = false;
  int settle_passes_used = 0;
};

/// Iterative threshold estimation. `gray` is the side*a square input, `light` holds one
/// flag per module (1 = light target), `function` marks modules rendered at pure black or
/// white, `varpi` is per pixel over the symbol area, `eta` per module.
LuminanceResult estimate_thresholds(const PixelGrid& gray, std::span<const std::uint8_t> light,
                                    std::span<const std::uint8_t> function, const Grid<double>& varpi,
                                    const Grid<double>& eta, const LuminanceConfig& config = {});

}  // namespace artup::lum
