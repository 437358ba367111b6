#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "artup/pipeline.hpp"

namespace artup::bench {

enum class Kind { RotateX, RotateY, RotateZ, Brightness, Scale, Coverage, Eta };

const char* to_string(Kind kind);
/// Accepts x, y, z, brightness, scale, coverage, eta (and the rotate_* spellings).
Kind parse_kind(std::string_view name);

/// Default parameter grid per kind: rotations in degrees, brightness as an additive shift,
/// scale as a ratio, coverage as a block count, eta from 1.00 down to 0.00.
std::vector<double> default_grid(Kind kind);

/// Where the symbol sits inside a rendered code, needed by the coverage perturbation.
struct SymbolFrame {
  int origin = 0;  // pixel offset of module (0, 0)
  int side = 0;    // modules per row
  int a = 1;       // pixels per module
};

/// Applies one perturbation. Rotations project the code from a pinhole camera at 4 code
/// widths onto a white canvas 1.5 times larger; coverage paints `parameter` seeded blocks
/// of 2a x 2a over the symbol (the first N blocks of a seed are the same for every N).
PixelGrid perturb(const PixelGrid& image, Kind kind, double parameter, const SymbolFrame& frame = {},
                  std::uint64_t seed = 0);

struct BenchItem {
  std::string id;
  PixelGrid image;
  qr::Payload payload;
  SymbolFrame frame;
  std::optional<qr::ModuleMatrix> truth;
};

struct SweepSpec {
  Kind kind = Kind::Brightness;
  std::vector<double> points;
  std::uint64_t seed = 0;
  int repetitions = 1;  // coverage uses 30
  int jobs = 0;         // <= 0 means hardware concurrency
};

struct Row {
  Kind kind;
  double parameter = 0;
  std::string image_id;
  scan::Outcome outcome = scan::Outcome::DetectFailed;
  int corrections = 0;
  bool success = false;  // decoded to the expected payload
};

struct RatePoint {
  double parameter = 0;
  double rate = 0;
  int trials = 0;
};

/// Scans every (item, point, repetition) job on a worker pool; rows come back in job order.
std::vector<Row> run_sweep(const std::vector<BenchItem>& items, const SweepSpec& spec);

/// Success rate per parameter, in first-seen order.
std::vector<RatePoint> aggregate(const std::vector<Row>& rows);

struct EtaSource {
  std::string id;
  PixelGrid image;
};

/// The mild perturbations applied to every eta-sweep output.
struct FixturePoint {
  Kind kind;
  double parameter;
};
std::vector<FixturePoint> eta_fixture();

/// Beautifies each image at each eta (uniform eta map) and scans the result under the
/// fixture. One row per (eta, image, fixture point), with parameter = eta.
std::vector<Row> eta_sweep(const std::vector<EtaSource>& images, const BeautifyConfig& base,
                           const std::vector<double>& etas, int jobs = 0);

/// Spearman rank correlation with average ranks for ties. NaN when either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// CSV with header kind,parameter,image_id,outcome,corrections.
std::string to_csv(const std::vector<Row>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<Row>& rows);
/// Minimal line plot of success rate against the parameter.
std::string to_svg(const std::vector<RatePoint>& points, const std::string& title);

/// Renders standard codes as sweep items (module_px pixels per module, 4-module quiet zone).
BenchItem standard_item(const std::string& id, const qr::Payload& payload, const qr::QrSpec& spec,
                        int module_px);

}  // namespace artup::bench
