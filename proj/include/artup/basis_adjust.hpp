#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "artup/qr_symbol.hpp"

namespace artup::basis {

/// Fixed-length GF(2) vector.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(int bits) : bits_(bits), words_(static_cast<std::size_t>((bits + 63) / 64), 0) {}

  int size() const { return bits_; }
  bool test(int i) const { return (words_[std::size_t(i) / 64] >> (i % 64)) & 1U; }
  void set(int i, bool v = true) {
    auto mask = std::uint64_t(1) << (i % 64);
    if (v) words_[std::size_t(i) / 64] |= mask;
    else words_[std::size_t(i) / 64] &= ~mask;
  }
  BitVector& operator^=(const BitVector& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  int count() const;
  bool any() const;
  bool operator==(const BitVector&) const = default;

 private:
  int bits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Codeword-bit vector of one RS block (data codewords then check codewords, MSB first).
BitVector block_bits(const gf::RsBlock& block);

struct Operator {
  int block = 0;
  BitVector bits;
  int pivot_bit = -1;     // bit index within the block
  int pivot_module = -1;  // module index y * side + x
};

enum class BasisKind { A, B };

struct OperatorBasis {
  BasisKind kind = BasisKind::A;
  std::vector<Operator> operators;

  std::size_t size() const { return operators.size(); }
  std::vector<int> pivot_modules() const;
};

/// One operator per padding bit: unit vector at that bit plus the RS check bits it induces.
/// Throws Error(NoPaddingAvailable) when no block has padding codewords.
OperatorBasis build_operator_set_a(const qr::EncodedSymbol& symbol, const qr::SymbolLayout& layout);
OperatorBasis build_operator_set_a(const qr::QrSpec& spec, const qr::Payload& payload);

/// Gauss-Jordan elimination that moves pivots to the highest-priority modules reachable
/// by span(A). `priority` holds one weight per module (row-major, side x side).
OperatorBasis eliminate_to_set_b(const OperatorBasis& a, const qr::SymbolLayout& layout,
                                 std::span<const double> priority);

/// XORs operator `op` into the module matrix (operators are mask-free, so this is literal).
void apply_operator(qr::ModuleMatrix& matrix, const Operator& op, const qr::SymbolLayout& layout);

/// Walks pivots in descending priority and applies each operator whose pivot module
/// disagrees with the target. `target_light` is 1 for light, per module.
qr::ModuleMatrix match_target(const qr::ModuleMatrix& base, const OperatorBasis& basis,
                              std::span<const std::uint8_t> target_light,
                              std::span<const double> priority, const qr::SymbolLayout& layout);

}  // namespace artup::basis
