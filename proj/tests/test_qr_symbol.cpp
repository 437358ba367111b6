#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <opencv2/wechat_qrcode.hpp>

#include "artup/qr_symbol.hpp"

using namespace artup;
using qr::EcLevel;

namespace {

constexpr EcLevel kLevels[] = {EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H};

qr::Payload random_payload(std::mt19937& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), byte(0, 255);
  qr::Payload p;
  p.bytes.resize(static_cast<std::size_t>(len(rng)));
  for (auto& b : p.bytes) b = std::uint8_t(byte(rng));
  return p;
}

std::string opencv_decode(const PixelGrid& gray) {
  cv::Mat m(gray.height(), gray.width(), CV_8UC1, const_cast<std::uint8_t*>(gray.bytes().data()));
  cv::wechat_qrcode::WeChatQRCode detector;
  auto found = detector.detectAndDecode(m);
  return found.empty() ? std::string() : found.front();
}

}  // namespace

TEST_CASE("symbol side is 4V+17") {
  CHECK(qr::QrSpec{1, EcLevel::L, 0}.side() == 21);
  CHECK(qr::QrSpec{10, EcLevel::L, 0}.side() == 57);
  CHECK(qr::encode_symbol(qr::Payload::from_string("A"), {1, EcLevel::L, 0}).side() == 21);
  CHECK(qr::encode_symbol(qr::Payload::from_string("A"), {10, EcLevel::H, 3}).side() == 57);
}

TEST_CASE("HELLO v2-H mask 0 round trip") {
  auto p = qr::Payload::from_string("HELLO");
  auto m = qr::encode_symbol(p, {2, EcLevel::H, 0});
  auto d = qr::decode_matrix(m);
  CHECK(d.payload == p);
  CHECK(d.corrections == 0);
  CHECK(d.spec == qr::QrSpec{2, EcLevel::H, 0});
}

TEST_CASE("format and version BCH words") {
  CHECK(qr::format_bits(EcLevel::M, 0) == 0x5412);
  CHECK(qr::format_bits(EcLevel::L, 0) == 0x77C4);
  CHECK(qr::version_bits(7) == 0x07C94);
  CHECK(qr::version_bits(10) == 0x0A4D3);
}

TEST_CASE("round trip over every version, level and mask") {
  std::mt19937 rng(2024);
  for (int v = 1; v <= 10; ++v)
    for (auto ec : kLevels)
      for (int mask = 0; mask < 8; ++mask) {
        auto p = random_payload(rng, qr::byte_capacity(v, ec));
        auto m = qr::encode_symbol(p, {v, ec, mask});
        auto d = qr::decode_matrix(m);
        REQUIRE(d.payload == p);
        REQUIRE(d.corrections == 0);
      }
}

TEST_CASE("independent decoder reads our symbols") {
  std::mt19937 rng(77);
  for (int v = 1; v <= 10; ++v)
    for (auto ec : kLevels) {
      std::string text = "v" + std::to_string(v) + qr::to_char(ec);
      while (int(text.size()) < qr::byte_capacity(v, ec) / 2) text += char('a' + rng() % 26);
      auto m = qr::encode_symbol(qr::Payload::from_string(text), {v, ec, int(rng() % 8)});
      auto img = qr::render(m, 8);
      CHECK(opencv_decode(img) == text);
    }
}

TEST_CASE("finder cross-sections are 1:1:3:1:1") {
  auto m = qr::encode_symbol(qr::Payload::from_string("finder"), {4, EcLevel::Q, 5});
  const int side = m.side();
  for (auto [cx, cy] : {std::pair{3, 3}, std::pair{side - 4, 3}, std::pair{3, side - 4}}) {
    for (bool horizontal : {true, false}) {
      std::vector<int> runs;
      bool cur = true;
      int len = 0;
      for (int i = -3; i <= 3; ++i) {
        bool d = horizontal ? m.dark(cx + i, cy) : m.dark(cx, cy + i);
        if (d == cur) ++len;
        else {
          runs.push_back(len);
          cur = d;
          len = 1;
        }
      }
      runs.push_back(len);
      CHECK(runs == std::vector<int>{1, 1, 3, 1, 1});
    }
  }
}

TEST_CASE("mask application is an involution") {
  auto spec = qr::QrSpec{6, EcLevel::M, 0};
  auto layout = qr::symbol_layout(spec);
  auto m = qr::encode_symbol(qr::Payload::from_string("mask involution"), spec);
  for (int mask = 0; mask < 8; ++mask) {
    auto copy = m;
    qr::apply_mask(copy, layout, mask);
    if (mask != 0) CHECK_FALSE(copy.same_modules(m));
    qr::apply_mask(copy, layout, mask);
    CHECK(copy.same_modules(m));
  }
}

TEST_CASE("decode survives codeword errors up to block capacity") {
  std::mt19937 rng(11);
  for (int v : {1, 3, 5, 7, 10})
    for (auto ec : kLevels) {
      qr::QrSpec spec{v, ec, int(rng() % 8)};
      auto p = random_payload(rng, qr::byte_capacity(v, ec));
      auto m = qr::encode_symbol(p, spec);
      auto layout = qr::symbol_layout(spec);
      int injected = 0;
      for (int b = 0; b < layout.geometry.num_blocks; ++b) {
        int len = layout.geometry.block_len(b);
        std::vector<int> cws(static_cast<std::size_t>(len));
        std::iota(cws.begin(), cws.end(), 0);
        std::shuffle(cws.begin(), cws.end(), rng);
        for (int e = 0; e < layout.geometry.ecc_per_block / 2; ++e) {
          int cw = cws[std::size_t(e)];
          int bits = 1 + int(rng() % 8);
          for (int k = 0; k < bits; ++k) m.flip_at(layout.blocks[b][std::size_t(cw * 8 + int(rng() % 8))]);
          ++injected;
        }
      }
      auto d = qr::decode_matrix(m);
      CHECK(d.payload == p);
      CHECK(d.corrections <= injected);
    }
}

TEST_CASE("degenerate grids are rejected") {
  qr::ModuleMatrix blank(25);
  try {
    qr::decode_matrix(blank);
    FAIL("expected FormatInfoUnreadable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatInfoUnreadable);
  }
  qr::ModuleMatrix odd(22);
  try {
    qr::decode_matrix(odd);
    FAIL("expected VersionUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VersionUnsupported);
  }
  qr::ModuleMatrix big(61);
  CHECK_THROWS_AS(qr::decode_matrix(big), Error);
}

TEST_CASE("capacity is enforced") {
  int cap = qr::byte_capacity(1, EcLevel::L);
  CHECK(cap == 17);
  std::string text(static_cast<std::size_t>(cap + 1), 'x');
  try {
    qr::encode_symbol(qr::Payload::from_string(text), {1, EcLevel::L, 0});
    FAIL("expected CapacityExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapacityExceeded);
  }
  CHECK(qr::min_version(cap, EcLevel::L) == 1);
  CHECK(qr::min_version(cap + 1, EcLevel::L) == 2);
  CHECK_FALSE(qr::min_version(1000, EcLevel::H).has_value());
}

TEST_CASE("controllable map covers exactly the padding codewords") {
  SUBCASE("full capacity leaves nothing") {
    std::string text(17, 'z');
    auto map = qr::controllable_map({1, EcLevel::L, 0}, qr::Payload::from_string(text));
    CHECK(std::count(map.begin(), map.end(), 1) == 0);
  }
  SUBCASE("short payload") {
    // 19 data codewords; 4 + 8 + 40 + 4 bits = 7 codewords of message.
    auto map = qr::controllable_map({1, EcLevel::L, 0}, qr::Payload::from_string("HELLO"));
    CHECK(std::count(map.begin(), map.end(), 1) == 8 * 12);
  }
  SUBCASE("multi-block counts and function exclusion") {
    qr::QrSpec spec{5, EcLevel::Q, 2};
    auto payload = qr::Payload::from_string("multi block");
    auto map = qr::controllable_map(spec, payload);
    auto g = qr::block_geometry(5, EcLevel::Q);
    int message = (4 + 8 + 8 * 11 + 4 + 7) / 8;
    CHECK(std::count(map.begin(), map.end(), 1) == 8 * (g.total_data() - message));
    auto layout = qr::symbol_layout(spec);
    for (std::size_t i = 0; i < map.size(); ++i)
      if (layout.function[i]) CHECK(map[i] == 0);
  }
}

TEST_CASE("role tags partition the grid") {
  qr::QrSpec spec{3, EcLevel::M, 1};
  auto sym = qr::encode(qr::Payload::from_string("roles"), spec);
  auto layout = qr::symbol_layout(spec);
  int counts[5] = {};
  for (int i = 0; i < spec.side() * spec.side(); ++i) ++counts[int(sym.matrix.role_at(i))];
  auto g = layout.geometry;
  CHECK(counts[int(qr::ModuleRole::Ecc)] == 8 * g.num_blocks * g.ecc_per_block);
  CHECK(counts[int(qr::ModuleRole::Message)] == 8 * sym.message_codewords);
  CHECK(counts[int(qr::ModuleRole::Remainder)] == 7);
  CHECK(counts[int(qr::ModuleRole::Message)] + counts[int(qr::ModuleRole::Padding)] == 8 * g.total_data());
}

TEST_CASE("PBM and rendered round trips") {
  auto m = qr::encode_symbol(qr::Payload::from_string("pbm"), {2, EcLevel::L, 4});
  auto back = qr::from_pbm(qr::to_pbm(m));
  CHECK(back.same_modules(m));
  for (int px : {1, 3, 8}) {
    auto img = qr::render(m, px);
    CHECK(img.width() == (25 + 8) * px);
    CHECK(qr::from_rendered(img).same_modules(m));
  }
  CHECK(qr::default_module_px(21) == 17);
  CHECK_THROWS_AS(qr::from_pbm("P2\n1 1\n0\n"), Error);
}
