#include "artup/galois.hpp"

#include <array>
#include <string>

#include "artup/error.hpp"

namespace artup::gf {
namespace {

struct Tables {
  std::array<Element, 512> exp{};
  std::array<int, 256> log{};

  Tables() {
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = Element(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x100) x ^= kPrimitive;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    log[0] = -1;
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

// Horner evaluation; poly is highest degree first.
Element eval(std::span<const Element> poly, Element x) {
  Element y = 0;
  for (Element c : poly) y = Element(mul(y, x) ^ c);
  return y;
}

// Lowest degree first (locator / evaluator convention).
Element eval_low(std::span<const Element> poly, Element x) {
  Element y = 0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) y = Element(mul(y, x) ^ *it);
  return y;
}

}  // namespace

Element mul(Element a, Element b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

Element div(Element a, Element b) {
  if (b == 0) throw Error(ErrorCode::InvalidArgument, "GF(256) division by zero");
  if (a == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[a] + 255 - t.log[b]];
}

Element inv(Element a) { return div(1, a); }

Element exp(int e) {
  e %= 255;
  if (e < 0) e += 255;
  return tables().exp[e];
}

int log(Element a) {
  if (a == 0) throw Error(ErrorCode::InvalidArgument, "log of zero in GF(256)");
  return tables().log[a];
}

std::vector<Element> generator_poly(int ecc_len) {
  std::vector<Element> g{1};
  for (int i = 0; i < ecc_len; ++i) {
    // g *= (x - alpha^i)
    std::vector<Element> next(g.size() + 1, 0);
    Element root = exp(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      next[j] ^= g[j];
      next[j + 1] ^= mul(g[j], root);
    }
    g = std::move(next);
  }
  return g;
}

RsBlock rs_encode(std::span<const std::uint8_t> data, int ecc_len) {
  if (ecc_len < 0 || data.size() + std::size_t(ecc_len) > 255)
    throw Error(ErrorCode::LengthViolation,
                "RS block length " + std::to_string(data.size() + ecc_len) + " exceeds 255");
  auto gen = generator_poly(ecc_len);
  std::vector<Element> rem(static_cast<std::size_t>(ecc_len), 0);
  for (std::uint8_t d : data) {
    Element factor = Element(d ^ (rem.empty() ? 0 : rem[0]));
    if (!rem.empty()) {
      rem.erase(rem.begin());
      rem.push_back(0);
    }
    for (int i = 0; i < ecc_len; ++i) rem[i] ^= mul(gen[i + 1], factor);
  }
  RsBlock block;
  block.ecc_len = ecc_len;
  block.codewords.assign(data.begin(), data.end());
  block.codewords.insert(block.codewords.end(), rem.begin(), rem.end());
  return block;
}

std::vector<Element> syndromes(std::span<const std::uint8_t> codewords, int ecc_len) {
  std::vector<Element> s(static_cast<std::size_t>(ecc_len));
  for (int j = 0; j < ecc_len; ++j) s[j] = eval(codewords, exp(j));
  return s;
}

bool is_codeword(std::span<const std::uint8_t> codewords, int ecc_len) {
  for (Element s : syndromes(codewords, ecc_len))
    if (s != 0) return false;
  return true;
}

RsDecoded rs_decode(const RsBlock& block) {
  const int n = int(block.codewords.size());
  const int c = block.ecc_len;
  auto synd = syndromes(block.codewords, c);

  RsDecoded out;
  bool clean = true;
  for (Element s : synd) clean = clean && s == 0;
  if (clean) {
    out.data.assign(block.codewords.begin(), block.codewords.begin() + block.data_len());
    return out;
  }

  // Berlekamp-Massey; locator polynomials stored lowest degree first.
  std::vector<Element> locator{1}, prev{1};
  int length = 0, shift = 1;
  Element prev_disc = 1;
  for (int k = 0; k < c; ++k) {
    Element disc = synd[k];
    for (int i = 1; i <= length && i < int(locator.size()); ++i)
      disc ^= mul(locator[i], synd[k - i]);
    if (disc == 0) {
      ++shift;
      continue;
    }
    auto scaled = locator;
    Element coef = div(disc, prev_disc);
    if (locator.size() < prev.size() + shift) locator.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) locator[i + shift] ^= mul(coef, prev[i]);
    if (2 * length <= k) {
      length = k + 1 - length;
      prev = std::move(scaled);
      prev_disc = disc;
      shift = 1;
    } else {
      ++shift;
    }
  }
  while (locator.size() > 1 && locator.back() == 0) locator.pop_back();
  const int degree = int(locator.size()) - 1;
  if (degree != length || 2 * degree > c)
    throw Error(ErrorCode::UncorrectableBlock, "too many errors in RS block");

  // Chien search over the n valid positions; position p is the power of x.
  std::vector<int> positions;
  for (int p = 0; p < n; ++p)
    if (eval_low(locator, exp(-p)) == 0) positions.push_back(p);
  if (int(positions.size()) != degree)
    throw Error(ErrorCode::UncorrectableBlock, "error locator roots do not match degree");

  // Forney with first consecutive root alpha^0: e = X * Omega(X^-1) / Lambda'(X^-1).
  std::vector<Element> omega(static_cast<std::size_t>(c), 0);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j <= i && j < int(locator.size()); ++j) omega[i] ^= mul(locator[j], synd[i - j]);
  std::vector<Element> deriv;
  for (std::size_t i = 1; i < locator.size(); ++i) deriv.push_back(i % 2 == 1 ? locator[i] : 0);

  std::vector<std::uint8_t> fixed = block.codewords;
  for (int p : positions) {
    Element x_inv = exp(-p);
    Element denom = eval_low(deriv, x_inv);
    if (denom == 0) throw Error(ErrorCode::UncorrectableBlock, "degenerate Forney denominator");
    Element magnitude = mul(exp(p), div(eval_low(omega, x_inv), denom));
    fixed[std::size_t(n - 1 - p)] ^= magnitude;
  }
  if (!is_codeword(fixed, c))
    throw Error(ErrorCode::UncorrectableBlock, "correction did not yield a codeword");

  out.data.assign(fixed.begin(), fixed.begin() + block.data_len());
  out.corrected = degree;
  return out;
}

}  // namespace artup::gf
