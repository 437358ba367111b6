#include "artup/basis_adjust.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace artup::basis {

int BitVector::count() const {
  int n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

bool BitVector::any() const {
  return std::any_of(words_.begin(), words_.end(), [](auto w) { return w != 0; });
}

BitVector block_bits(const gf::RsBlock& block) {
  BitVector v(int(block.codewords.size()) * 8);
  for (std::size_t i = 0; i < block.codewords.size() * 8; ++i)
    if ((block.codewords[i / 8] >> (7 - i % 8)) & 1U) v.set(int(i));
  return v;
}

std::vector<int> OperatorBasis::pivot_modules() const {
  std::vector<int> out;
  out.reserve(operators.size());
  for (const auto& op : operators) out.push_back(op.pivot_module);
  return out;
}

OperatorBasis build_operator_set_a(const qr::EncodedSymbol& symbol, const qr::SymbolLayout& layout) {
  OperatorBasis basis;
  basis.kind = BasisKind::A;
  const auto& g = layout.geometry;
  for (int b = 0; b < g.num_blocks; ++b) {
    auto [first, last] = symbol.padding_range(b);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(g.data_len(b)), 0);
    for (int cw = first; cw < last; ++cw)
      for (int bit = 0; bit < 8; ++bit) {
        data[std::size_t(cw)] = std::uint8_t(0x80 >> bit);
        Operator op;
        op.block = b;
        op.bits = block_bits(gf::rs_encode(data, g.ecc_per_block));
        op.pivot_bit = cw * 8 + bit;
        op.pivot_module = layout.blocks[b][std::size_t(op.pivot_bit)];
        basis.operators.push_back(std::move(op));
        data[std::size_t(cw)] = 0;
      }
  }
  if (basis.operators.empty())
    throw Error(ErrorCode::NoPaddingAvailable, "payload leaves no padding codewords to adjust");
  return basis;
}

OperatorBasis build_operator_set_a(const qr::QrSpec& spec, const qr::Payload& payload) {
  return build_operator_set_a(qr::encode(payload, spec), qr::symbol_layout(spec));
}

OperatorBasis eliminate_to_set_b(const OperatorBasis& a, const qr::SymbolLayout& layout,
                                 std::span<const double> priority) {
  const int modules = layout.side() * layout.side();
  if (int(priority.size()) != modules)
    throw Error(ErrorCode::DimensionMismatch, "priority map does not match symbol size");

  OperatorBasis out;
  out.kind = BasisKind::B;
  const int num_blocks = layout.geometry.num_blocks;
  for (int b = 0; b < num_blocks; ++b) {
    std::vector<Operator> rows;
    for (const auto& op : a.operators)
      if (op.block == b) rows.push_back(op);
    if (rows.empty()) continue;

    const auto& bit_modules = layout.blocks[b];
    std::vector<int> order(bit_modules.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      double px = priority[std::size_t(bit_modules[x])], py = priority[std::size_t(bit_modules[y])];
      if (px != py) return px > py;
      return bit_modules[x] < bit_modules[y];
    });

    std::size_t pivoted = 0;
    for (int pos : order) {
      if (pivoted == rows.size()) break;
      std::size_t r = pivoted;
      while (r < rows.size() && !rows[r].bits.test(pos)) ++r;
      if (r == rows.size()) continue;
      std::swap(rows[pivoted], rows[r]);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != pivoted && rows[i].bits.test(pos)) rows[i].bits ^= rows[pivoted].bits;
      rows[pivoted].pivot_bit = pos;
      rows[pivoted].pivot_module = bit_modules[std::size_t(pos)];
      ++pivoted;
    }
    for (auto& row : rows) out.operators.push_back(std::move(row));
  }
  return out;
}

void apply_operator(qr::ModuleMatrix& matrix, const Operator& op, const qr::SymbolLayout& layout) {
  const auto& bit_modules = layout.blocks[std::size_t(op.block)];
  for (int i = 0; i < op.bits.size(); ++i)
    if (op.bits.test(i)) matrix.flip_at(bit_modules[std::size_t(i)]);
}

qr::ModuleMatrix match_target(const qr::ModuleMatrix& base, const OperatorBasis& basis,
                              std::span<const std::uint8_t> target_light,
                              std::span<const double> priority, const qr::SymbolLayout& layout) {
  const std::size_t modules = std::size_t(base.side()) * base.side();
  if (base.side() != layout.side() || target_light.size() != modules || priority.size() != modules)
    throw Error(ErrorCode::DimensionMismatch, "target, priority and base must share the symbol size");

  std::vector<std::size_t> order(basis.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    int mx = basis.operators[x].pivot_module, my = basis.operators[y].pivot_module;
    if (priority[std::size_t(mx)] != priority[std::size_t(my)])
      return priority[std::size_t(mx)] > priority[std::size_t(my)];
    return mx < my;
  });

  qr::ModuleMatrix out = base;
  for (std::size_t i : order) {
    const auto& op = basis.operators[i];
    bool want_dark = target_light[std::size_t(op.pivot_module)] == 0;
    if (out.dark_at(op.pivot_module) != want_dark) apply_operator(out, op, layout);
  }
  return out;
}

}  // namespace artup::basis
