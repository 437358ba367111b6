#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace artup::gf {

/// Reducing polynomial x^8 + x^4 + x^3 + x^2 + 1.
inline constexpr unsigned kPrimitive = 0x11D;

using Element = std::uint8_t;

inline Element add(Element a, Element b) { return a ^ b; }
Element mul(Element a, Element b);
Element div(Element a, Element b);
Element inv(Element a);
/// alpha^e with alpha = 2; e may be any integer.
Element exp(int e);
/// Discrete log base alpha; a must be nonzero.
int log(Element a);

/// Systematic Reed-Solomon block: data codewords followed by `ecc_len` check codewords.
struct RsBlock {
  std::vector<std::uint8_t> codewords;
  int ecc_len = 0;

  int data_len() const { return int(codewords.size()) - ecc_len; }
  std::span<const std::uint8_t> data() const {
    return std::span(codewords).first(static_cast<std::size_t>(data_len()));
  }
  std::span<const std::uint8_t> ecc() const {
    return std::span(codewords).last(static_cast<std::size_t>(ecc_len));
  }
};

/// Coefficients of prod_{i<c} (x - alpha^i), highest degree first, leading 1 included.
std::vector<Element> generator_poly(int ecc_len);

/// Throws Error(LengthViolation) when data.size() + ecc_len > 255.
RsBlock rs_encode(std::span<const std::uint8_t> data, int ecc_len);

/// Syndromes S_j = r(alpha^j), j < ecc_len.
std::vector<Element> syndromes(std::span<const std::uint8_t> codewords, int ecc_len);
bool is_codeword(std::span<const std::uint8_t> codewords, int ecc_len);

struct RsDecoded {
  std::vector<std::uint8_t> data;
  int corrected = 0;
};

/// Berlekamp-Massey / Chien / Forney decoder. Throws Error(UncorrectableBlock)
/// when the error pattern cannot be resolved within floor(ecc_len / 2).
RsDecoded rs_decode(const RsBlock& block);

}  // namespace artup::gf
