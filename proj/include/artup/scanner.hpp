#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "artup/image.hpp"
#include "artup/qr_symbol.hpp"

namespace artup::scan {

/// Binarized image, 1 = light (gray at or above the local threshold).
using BinaryImage = Grid<std::uint8_t>;

inline constexpr int kBlock = 8;
inline constexpr int kMinSide = 5 * kBlock;

/// Local block-average binarization: 8x8 blocks (the last row/column of blocks is shifted
/// inward to end at the border), threshold = mean of the block points in the clipped 5x5
/// block neighborhood. A block point is the block mean, or for flat blocks (range <= 24)
/// half the minimum raised to the upper/left neighbor average when the block is darker.
/// Throws Error(ImageTooSmall) below 40x40.
BinaryImage hybrid_binarize(const PixelGrid& gray);
/// Same result computed with direct loops over pixels.
BinaryImage hybrid_binarize_naive(const PixelGrid& gray);

struct Point {
  double x = 0, y = 0;
};

struct FinderPattern {
  Point center;
  double module_size = 0;
  int count = 1;
};

/// All finder candidates confirmed on at least two scan lines, sorted by count.
std::vector<FinderPattern> find_finder_candidates(const BinaryImage& binary);

struct FinderTriple {
  FinderPattern top_left, top_right, bottom_left;
};

/// Plausible triples (roughly right-angled, similar module sizes), best first.
/// Throws Error(DetectFailed) if none.
std::vector<FinderTriple> detect_finders(const BinaryImage& binary, int max_triples = 4);

/// Module size along the finder-to-finder lines.
double estimate_module_size(const BinaryImage& binary, const FinderTriple& t);
/// Symbol side from finder spacing. Throws Error(VersionEstimateFailed).
int estimate_dimension(const FinderTriple& t, double module_size);

std::optional<Point> find_alignment(const BinaryImage& binary, const FinderTriple& t, int dimension,
                                    double module_size);

/// Samples every module center through the perspective map fixed by the finder centers and
/// either the alignment center or the extrapolated fourth corner. Returns dark = 1 modules.
qr::ModuleMatrix sample_grid(const BinaryImage& binary, const FinderTriple& t, int dimension,
                             const std::optional<Point>& alignment);

enum class Outcome { Decoded, DetectFailed, DecodeFailed };
const char* to_string(Outcome o);

struct ScanReport {
  Outcome outcome = Outcome::DetectFailed;
  qr::Payload payload;
  int corrections = 0;
  std::optional<qr::QrSpec> spec;
  std::optional<qr::ModuleMatrix> sampled;
  /// 1 where the sampled module differs from the ground truth.
  std::optional<Grid<std::uint8_t>> error_mask;
  std::string message;

  bool ok() const { return outcome == Outcome::Decoded; }
  int error_count() const;
};

struct ScanOptions {
  int max_triples = 4;
};

/// Full pipeline: gray, binarize, detect, sample, decode. Never throws on bad image content.
ScanReport scan(const PixelGrid& image, const qr::ModuleMatrix* ground_truth = nullptr,
                const ScanOptions& options = {});

/// Red/green overlay of the error mask on the sampled grid, `module_px` pixels per module.
PixelGrid error_overlay(const ScanReport& report, int module_px = 8);

}  // namespace artup::scan
