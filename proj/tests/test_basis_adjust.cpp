#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "artup/basis_adjust.hpp"

using namespace artup;
using qr::EcLevel;

namespace {

// Row-reduction rank over GF(2) on plain bool rows, restricted to the given columns.
int rank_on(const std::vector<basis::BitVector>& rows, const std::vector<int>& cols) {
  std::vector<std::vector<char>> m;
  for (const auto& r : rows) {
    std::vector<char> row;
    for (int c : cols) row.push_back(r.test(c) ? 1 : 0);
    m.push_back(row);
  }
  int rank = 0;
  for (std::size_t c = 0; c < cols.size() && rank < int(m.size()); ++c) {
    std::size_t p = std::size_t(rank);
    while (p < m.size() && !m[p][c]) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[std::size_t(rank)]);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (i != std::size_t(rank) && m[i][c])
        for (std::size_t k = 0; k < cols.size(); ++k) m[i][k] ^= m[std::size_t(rank)][k];
    ++rank;
  }
  return rank;
}

std::vector<int> all_cols(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<basis::BitVector> rows_of(const basis::OperatorBasis& b, int block) {
  std::vector<basis::BitVector> out;
  for (const auto& op : b.operators)
    if (op.block == block) out.push_back(op.bits);
  return out;
}

std::vector<double> random_priority(int modules, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(modules));
  for (auto& x : w) x = u(rng);
  return w;
}

}  // namespace

TEST_CASE("set A has one codeword-preserving operator per padding bit") {
  qr::QrSpec spec{3, EcLevel::L, 2};
  auto payload = qr::Payload::from_string("operators");
  auto sym = qr::encode(payload, spec);
  auto layout = qr::symbol_layout(spec);
  auto a = basis::build_operator_set_a(sym, layout);
  auto map = qr::controllable_map(spec, payload);
  CHECK(int(a.size()) == std::count(map.begin(), map.end(), 1));
  CHECK(a.kind == basis::BasisKind::A);

  for (const auto& op : a.operators) {
    // An operator XORed into any codeword yields a codeword.
    auto len = layout.geometry.block_len(op.block);
    std::vector<std::uint8_t> cw(static_cast<std::size_t>(len), 0);
    for (int i = 0; i < op.bits.size(); ++i)
      if (op.bits.test(i)) cw[std::size_t(i / 8)] |= std::uint8_t(0x80 >> (i % 8));
    REQUIRE(gf::is_codeword(cw, layout.geometry.ecc_per_block));
    // Data part is the unit vector at the padding bit.
    for (int i = 0; i < layout.geometry.data_len(op.block) * 8; ++i) REQUIRE(op.bits.test(i) == (i == op.pivot_bit));
    REQUIRE(map[std::size_t(op.pivot_module)] == 1);
  }
}

TEST_CASE("no padding means no operators") {
  std::string full(static_cast<std::size_t>(qr::byte_capacity(2, EcLevel::M)), 'q');
  try {
    basis::build_operator_set_a({2, EcLevel::M, 0}, qr::Payload::from_string(full));
    FAIL("expected NoPaddingAvailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPaddingAvailable);
  }
}

TEST_CASE("operators are involutions that keep the payload and function patterns") {
  qr::QrSpec spec{4, EcLevel::M, 6};
  auto payload = qr::Payload::from_string("involution");
  auto sym = qr::encode(payload, spec);
  auto layout = qr::symbol_layout(spec);
  std::mt19937 rng(3);
  auto b = basis::eliminate_to_set_b(basis::build_operator_set_a(sym, layout), layout,
                                     random_priority(spec.side() * spec.side(), rng));
  for (const auto& op : b.operators) {
    auto m = sym.matrix;
    basis::apply_operator(m, op, layout);
    for (std::size_t i = 0; i < layout.function.size(); ++i)
      if (layout.function[i]) REQUIRE(m.dark_at(int(i)) == sym.matrix.dark_at(int(i)));
    auto d = qr::decode_matrix(m);
    REQUIRE(d.payload == payload);
    REQUIRE(d.corrections == 0);
    basis::apply_operator(m, op, layout);
    REQUIRE(m.same_modules(sym.matrix));
  }
}

TEST_CASE("every combination of a small basis decodes cleanly") {
  // 16 bytes at 1-L and 31 bytes at 2-L each leave exactly one padding codeword.
  for (auto [spec, len] : {std::pair{qr::QrSpec{1, EcLevel::L, 0}, 16}, std::pair{qr::QrSpec{2, EcLevel::L, 5}, 31}}) {
    auto payload = qr::Payload::from_string(std::string(static_cast<std::size_t>(len), 'k'));
    auto sym = qr::encode(payload, spec);
    auto layout = qr::symbol_layout(spec);
    auto a = basis::build_operator_set_a(sym, layout);
    REQUIRE(a.size() == 8);
    for (unsigned subset = 0; subset < 256; ++subset) {
      auto m = sym.matrix;
      for (unsigned k = 0; k < 8; ++k)
        if (subset & (1U << k)) basis::apply_operator(m, a.operators[k], layout);
      auto d = qr::decode_matrix(m);
      REQUIRE(d.payload == payload);
      REQUIRE(d.corrections == 0);
    }
  }
}

TEST_CASE("elimination preserves the span and picks greedy pivots") {
  std::mt19937 rng(21);
  for (auto spec : {qr::QrSpec{2, EcLevel::M, 0}, qr::QrSpec{5, EcLevel::Q, 3}, qr::QrSpec{7, EcLevel::H, 1}}) {
    auto payload = qr::Payload::from_string("span");
    auto sym = qr::encode(payload, spec);
    auto layout = qr::symbol_layout(spec);
    auto priority = random_priority(spec.side() * spec.side(), rng);
    auto a = basis::build_operator_set_a(sym, layout);
    auto b = basis::eliminate_to_set_b(a, layout, priority);
    CHECK(b.kind == basis::BasisKind::B);
    CHECK(b.size() == a.size());

    auto pivots = b.pivot_modules();
    CHECK(std::set<int>(pivots.begin(), pivots.end()).size() == pivots.size());

    for (int blk = 0; blk < layout.geometry.num_blocks; ++blk) {
      auto ra = rows_of(a, blk), rb = rows_of(b, blk);
      if (ra.empty()) continue;
      int n = layout.geometry.block_len(blk) * 8;
      auto cols = all_cols(n);
      auto both = ra;
      both.insert(both.end(), rb.begin(), rb.end());
      CHECK(rank_on(ra, cols) == int(ra.size()));
      CHECK(rank_on(rb, cols) == int(ra.size()));
      CHECK(rank_on(both, cols) == int(ra.size()));

      // Matroid greedy: in priority order, a bit is a pivot iff it raises the rank of the prefix.
      const auto& mods = layout.blocks[std::size_t(blk)];
      std::vector<int> order = cols;
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        double px = priority[std::size_t(mods[x])], py = priority[std::size_t(mods[y])];
        return px != py ? px > py : mods[x] < mods[y];
      });
      std::set<int> expected;
      std::vector<int> prefix;
      int r = 0;
      for (int pos : order) {
        prefix.push_back(pos);
        int nr = rank_on(ra, prefix);
        if (nr > r) expected.insert(pos);
        r = nr;
        if (r == int(ra.size())) break;
      }
      std::set<int> got;
      for (const auto& op : b.operators)
        if (op.block == blk) {
          got.insert(op.pivot_bit);
          // Each row is zero on every other pivot of its block.
          for (const auto& other : b.operators)
            if (other.block == blk && other.pivot_bit != op.pivot_bit) REQUIRE_FALSE(op.bits.test(other.pivot_bit));
          REQUIRE(op.bits.test(op.pivot_bit));
        }
      CHECK(got == expected);
    }
  }
}

TEST_CASE("priority steers pivots toward check-codeword modules") {
  qr::QrSpec spec{3, EcLevel::L, 0};
  auto payload = qr::Payload::from_string("steer");
  auto sym = qr::encode(payload, spec);
  auto layout = qr::symbol_layout(spec);
  std::vector<double> priority(static_cast<std::size_t>(spec.side() * spec.side()), 0.0);
  const auto& mods = layout.blocks[0];
  int data_bits = layout.geometry.data_len(0) * 8;
  int favoured = mods[std::size_t(data_bits + 5)];
  priority[std::size_t(favoured)] = 1.0;
  auto b = basis::eliminate_to_set_b(basis::build_operator_set_a(sym, layout), layout, priority);
  auto pivots = b.pivot_modules();
  CHECK(std::find(pivots.begin(), pivots.end(), favoured) != pivots.end());
}

TEST_CASE("match_target hits every pivot and never breaks decoding") {
  std::mt19937 rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    int v = 1 + trial % 10;
    auto ec = EcLevel(trial % 4);
    qr::QrSpec spec{v, ec, int(rng() % 8)};
    auto payload = qr::Payload::from_string("t" + std::to_string(trial));
    auto sym = qr::encode(payload, spec);
    auto layout = qr::symbol_layout(spec);
    const int modules = spec.side() * spec.side();
    auto priority = random_priority(modules, rng);
    auto b = basis::eliminate_to_set_b(basis::build_operator_set_a(sym, layout), layout, priority);
    std::vector<std::uint8_t> target(static_cast<std::size_t>(modules));
    for (auto& t : target) t = std::uint8_t(rng() & 1U);
    auto m = basis::match_target(sym.matrix, b, target, priority, layout);
    for (int p : b.pivot_modules()) REQUIRE(m.dark_at(p) == (target[std::size_t(p)] == 0));
    auto d = qr::decode_matrix(m);
    REQUIRE(d.payload == payload);
    REQUIRE(d.corrections == 0);
  }
}

TEST_CASE("match_target on the base target is a no-op") {
  qr::QrSpec spec{4, EcLevel::Q, 2};
  auto sym = qr::encode(qr::Payload::from_string("noop"), spec);
  auto layout = qr::symbol_layout(spec);
  const int modules = spec.side() * spec.side();
  std::vector<double> priority(static_cast<std::size_t>(modules), 0.5);
  auto b = basis::eliminate_to_set_b(basis::build_operator_set_a(sym, layout), layout, priority);
  std::vector<std::uint8_t> target(static_cast<std::size_t>(modules));
  for (int i = 0; i < modules; ++i) target[std::size_t(i)] = sym.matrix.dark_at(i) ? 0 : 1;
  CHECK(basis::match_target(sym.matrix, b, target, priority, layout).same_modules(sym.matrix));
  std::vector<std::uint8_t> short_target(5);
  CHECK_THROWS_AS(basis::match_target(sym.matrix, b, short_target, priority, layout), Error);
}
