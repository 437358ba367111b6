#pragma once

#include <optional>
#include <string>

#include "artup/basis_adjust.hpp"
#include "artup/colorize.hpp"
#include "artup/imageprep.hpp"
#include "artup/luminance.hpp"
#include "artup/qr_symbol.hpp"
#include "artup/scanner.hpp"

namespace artup {

enum class EtaMode { Scalar, Map };

struct BeautifyConfig {
  qr::Payload payload;
  int version = 0;  // 0 picks the smallest version that fits
  qr::EcLevel ec = qr::EcLevel::M;
  int mask = 0;
  EtaMode eta_mode = EtaMode::Scalar;
  double eta = 0.9;
  lum::VarpiOptions varpi;
  double sigma2 = prob::kDefaultSigma2;
  double sigma3 = 0;  // <= 0 means a / 6
  /// Target canvas side in pixels, quiet zone included.
  int size = 512;
  bool verify = false;
  imageprep::PriorityWeights lambda;

  /// Throws Error(InvalidArgument) on out-of-range values.
  void validate() const;
};

/// Everything that does not depend on eta or varpi: the resampled input, the priority map
/// and the binary aesthetic code.
struct BinaryStage {
  qr::QrSpec spec;
  prob::CanvasLayout layout;
  PixelGrid rgb;   // symbol-area input, side*a square
  PixelGrid gray;  // luma of rgb
  imageprep::PriorityMap priority;
  Grid<std::uint8_t> target;  // module binarization of the input, 1 = light
  qr::ModuleMatrix base;      // standard encoding
  qr::ModuleMatrix qb;        // after operator matching
  std::vector<std::uint8_t> function;
  int controllable = 0;        // operators in set B
  int matched_modules = 0;     // modules of qb agreeing with the target

  std::vector<std::uint8_t> light() const;
};

struct BeautifyResult {
  BinaryStage binary;
  PixelGrid qb_image;  // canvas rendering of qb
  lum::LuminanceResult luminance;
  color::ColorizeResult color;
  Grid<double> eta;
  std::optional<scan::ScanReport> verification;

  const PixelGrid& qg() const { return luminance.qg; }
  const PixelGrid& qc() const { return color.qc; }
};

/// Raised by beautify when `verify` is set and the output does not scan back.
class VerificationError : public Error {
 public:
  VerificationError(const std::string& what, scan::ScanReport report)
      : Error(ErrorCode::VerificationFailed, what), report_(std::move(report)) {}
  const scan::ScanReport& report() const { return report_; }

 private:
  scan::ScanReport report_;
};

/// Pixels per module for a canvas of about `size` pixels.
int module_pixels(int side, int size, int quiet = qr::kQuietZone);

BinaryStage binary_stage(const PixelGrid& image, const BeautifyConfig& config);
BeautifyResult finish(BinaryStage binary, const BeautifyConfig& config);
/// Full pipeline: binary, grayscale and color stages. Throws Error(CapacityExceeded) when
/// the payload does not fit, VerificationError when `verify` is set and scanning fails.
BeautifyResult beautify(const PixelGrid& image, const BeautifyConfig& config);

/// Per-module map drawn as a blue-to-red canvas, `module_px` pixels per module.
PixelGrid heat_map(const Grid<double>& values, int module_px, double lo = 0.0, double hi = 1.0);

}  // namespace artup
