#include "artup/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace artup {

void BeautifyConfig::validate() const {
  if (version < 0 || version > qr::kMaxVersion)
    throw Error(ErrorCode::InvalidArgument, "version must be 0 (auto) or 1.." + std::to_string(qr::kMaxVersion));
  if (mask < 0 || mask > 7) throw Error(ErrorCode::InvalidArgument, "mask must be 0..7");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in [0, 1]");
  if (!(sigma2 > 0)) throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
  if (!(sigma3 >= 0)) throw Error(ErrorCode::InvalidArgument, "sigma3 must be non-negative");
  if (size < 64 || size > 8192) throw Error(ErrorCode::InvalidArgument, "size must be 64..8192");
}

std::vector<std::uint8_t> BinaryStage::light() const {
  std::vector<std::uint8_t> out(qb.cells().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = qb.cells()[k] ? 0 : 1;
  return out;
}

int module_pixels(int side, int size, int quiet) { return std::max(2, size / (side + 2 * quiet)); }

BinaryStage binary_stage(const PixelGrid& image, const BeautifyConfig& config) {
  config.validate();
  const int length = int(config.payload.bytes.size());
  int version = config.version;
  if (version == 0) {
    auto v = qr::min_version(length, config.ec);
    if (!v)
      throw Error(ErrorCode::CapacityExceeded, std::to_string(length) + " bytes do not fit any supported version at EC " +
                                                   qr::to_char(config.ec));
    version = *v;
  }

  BinaryStage st;
  st.spec = {version, config.ec, config.mask};
  auto encoded = qr::encode(config.payload, st.spec);
  auto layout = qr::symbol_layout(st.spec);
  const int side = st.spec.side();
  st.layout = {side, module_pixels(side, config.size), qr::kQuietZone};
  const int n = st.layout.symbol_px();

  st.rgb = resize_bicubic(to_rgb(center_square(image)), n, n);
  st.gray = imageprep::to_grayscale(st.rgb);
  st.priority = imageprep::priority_map(st.rgb, side, config.lambda);
  st.target = imageprep::module_binarize(st.gray, side);
  st.base = encoded.matrix;
  st.function = layout.function;

  const auto w = st.priority.w.values();
  try {
    auto a = basis::build_operator_set_a(encoded, layout);
    auto b = basis::eliminate_to_set_b(a, layout, w);
    st.controllable = int(b.size());
    st.qb = basis::match_target(st.base, b, st.target.values(), w, layout);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPaddingAvailable) throw;
    st.qb = st.base;
  }
  for (int k = 0; k < side * side; ++k) st.matched_modules += (st.qb.dark_at(k) ? 0 : 1) == st.target[std::size_t(k)];
  return st;
}

BeautifyResult finish(BinaryStage binary, const BeautifyConfig& config) {
  config.validate();
  BeautifyResult res;
  const auto layout = binary.layout;
  const int side = layout.side, a = layout.a;

  lum::VarpiOptions vo = config.varpi;
  if (vo.sigma3 <= 0) vo.sigma3 = config.sigma3;
  auto varpi = lum::make_varpi(vo, side, a, binary.gray);
  res.eta = config.eta_mode == EtaMode::Map ? lum::eta_from_priority(binary.priority.w)
                                            : lum::eta_constant(side, config.eta);

  lum::LuminanceConfig lc;
  lc.sigma2 = config.sigma2;
  lc.sigma3 = config.sigma3;
  lc.quiet = layout.quiet;
  const auto light = binary.light();
  res.luminance = lum::estimate_thresholds(binary.gray, light, binary.function, varpi, res.eta, lc);
  res.color = color::colorize(pad(binary.rgb, layout.origin_px(), 255), res.luminance.qg, light, layout);
  res.qb_image = qr::render(binary.qb, a, layout.quiet);

  if (config.verify) {
    auto report = scan::scan(res.color.qc, &binary.qb);
    if (!report.ok() || report.payload != config.payload) {
      std::string why = report.ok() ? "scanned payload differs" : report.message;
      throw VerificationError("output does not scan back: " + why, std::move(report));
    }
    res.verification = std::move(report);
  }
  res.binary = std::move(binary);
  return res;
}

BeautifyResult beautify(const PixelGrid& image, const BeautifyConfig& config) {
  return finish(binary_stage(image, config), config);
}

PixelGrid heat_map(const Grid<double>& values, int module_px, double lo, double hi) {
  PixelGrid out = PixelGrid::rgb(values.width() * module_px, values.height() * module_px);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      double v = values(x / module_px, y / module_px);
      double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
      out.set_rgb(x, y, Rgb{std::uint8_t(std::lround(255 * t)), std::uint8_t(std::lround(60 * (1 - std::abs(2 * t - 1)))),
                            std::uint8_t(std::lround(255 * (1 - t)))});
    }
  return out;
}

}  // namespace artup
