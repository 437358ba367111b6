#include <doctest.h>

#include "artup/pipeline.hpp"

using namespace artup;

namespace {

PixelGrid corpus(const char* name) {
  return read_image(std::string(ARTUP_SOURCE_DIR) + "/data/corpus/" + name + ".png");
}

BeautifyConfig url_config(double eta) {
  BeautifyConfig c;
  c.payload = qr::Payload::from_string("https://example.org/artup");
  c.version = 5;
  c.eta = eta;
  return c;
}

}  // namespace

TEST_CASE("eta 1 reproduces the binary code exactly") {
  auto r = beautify(corpus("chelsea"), url_config(1.0));
  CHECK(r.qc() == to_rgb(r.qb_image));
  CHECK(r.qg() == r.qb_image);
  auto report = scan::scan(r.qc(), &r.binary.qb);
  CHECK(report.ok());
  CHECK(report.corrections == 0);
}

TEST_CASE("eta 0 keeps the data region of the input") {
  auto cfg = url_config(0.0);
  auto r = beautify(corpus("coffee"), cfg);
  const auto& lay = r.binary.layout;
  const int o = lay.origin_px();
  int checked = 0;
  for (int y = 0; y < lay.symbol_px(); ++y)
    for (int x = 0; x < lay.symbol_px(); ++x) {
      if (r.binary.function[std::size_t(y / lay.a) * lay.side + x / lay.a]) continue;
      REQUIRE(r.qc().rgb_at(o + x, o + y) == r.binary.rgb.rgb_at(x, y));
      ++checked;
    }
  CHECK(checked > 0);
}

TEST_CASE("binary stage") {
  auto cfg = url_config(0.9);
  auto st = binary_stage(corpus("camera"), cfg);
  CHECK(st.spec.version == 5);
  CHECK(st.layout.a == module_pixels(37, 512));
  CHECK(st.layout.canvas_px() <= 512);
  CHECK(st.controllable > 0);
  auto decoded = qr::decode_matrix(st.qb);
  CHECK(decoded.payload == cfg.payload);
  CHECK(decoded.corrections == 0);

  // Matching the target can only add agreement over the plain encoding.
  int base_match = 0;
  for (int k = 0; k < 37 * 37; ++k) base_match += (st.base.dark_at(k) ? 0 : 1) == st.target[std::size_t(k)];
  CHECK(st.matched_modules > base_match);

  auto again = binary_stage(corpus("camera"), cfg);
  CHECK(again.qb.same_modules(st.qb));

  cfg.version = 0;
  CHECK(binary_stage(corpus("camera"), cfg).spec.version == 2);
}

TEST_CASE("configuration errors") {
  auto img = PixelGrid::rgb(64, 64, 128);
  auto cfg = url_config(0.9);
  cfg.eta = 1.5;
  CHECK_THROWS_AS(beautify(img, cfg), Error);
  cfg = url_config(0.9);
  cfg.mask = 9;
  CHECK_THROWS_AS(beautify(img, cfg), Error);
  cfg = url_config(0.9);
  cfg.version = 0;
  cfg.payload.bytes.assign(400, 'x');
  try {
    beautify(img, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapacityExceeded);
  }
}

TEST_CASE("verification") {
  auto cfg = url_config(0.9);
  cfg.version = 0;
  cfg.verify = true;
  auto r = beautify(corpus("rocket"), cfg);
  REQUIRE(r.verification);
  CHECK(r.verification->ok());

  cfg.eta = 0.0;
  try {
    beautify(corpus("rocket"), cfg);
    FAIL("expected verification failure");
  } catch (const VerificationError& e) {
    CHECK(e.code() == ErrorCode::VerificationFailed);
    CHECK_FALSE(e.report().ok());
  }
}

TEST_CASE("deterministic with the random preset, eta map mode") {
  auto cfg = url_config(0.9);
  cfg.varpi.preset = lum::VarpiPreset::Random;
  cfg.varpi.seed = 7;
  cfg.eta_mode = EtaMode::Map;
  auto img = corpus("logo");
  auto a = beautify(img, cfg), b = beautify(img, cfg);
  CHECK(encode_png(a.qc()) == encode_png(b.qc()));
  for (double v : a.eta.values()) {
    CHECK(v >= 0.75 - 1e-12);
    CHECK(v <= 0.90 + 1e-12);
  }
  cfg.varpi.seed = 8;
  CHECK_FALSE(beautify(img, cfg).qc() == a.qc());
}

TEST_CASE("heat map") {
  Grid<double> g(3, 2, 0.0);
  g(2, 1) = 1.0;
  auto h = heat_map(g, 4);
  CHECK(h.width() == 12);
  CHECK(h.height() == 8);
  CHECK(h.rgb_at(0, 0).b == 255);
  CHECK(h.rgb_at(11, 7).r == 255);
}
