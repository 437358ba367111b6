#include "artup/qr_symbol.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <sstream>

namespace artup::qr {
namespace {

// Indexed [ec][version], ec order L, M, Q, H.
constexpr std::array<std::array<int, 11>, 4> kEccPerBlock{{
    {-1, 7, 10, 15, 20, 26, 18, 20, 24, 30, 18},
    {-1, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26},
    {-1, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24},
    {-1, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28},
}};
constexpr std::array<std::array<int, 11>, 4> kNumBlocks{{
    {-1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4},
    {-1, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5},
    {-1, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8},
    {-1, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8},
}};

int raw_data_modules(int version) {
  int result = (16 * version + 128) * version + 64;
  if (version >= 2) {
    int num_align = version / 7 + 2;
    result -= (25 * num_align - 10) * num_align - 55;
    if (version >= 7) result -= 36;
  }
  return result;
}

std::vector<int> alignment_positions(int version) {
  if (version == 1) return {};
  int side = 4 * version + 17;
  int num = version / 7 + 2;
  int step = (version == 32) ? 26 : (version * 4 + num * 2 + 1) / (num * 2 - 2) * 2;
  std::vector<int> pos(num);
  pos[0] = 6;
  for (int i = num - 1, p = side - 7; i >= 1; --i, p -= step) pos[i] = p;
  return pos;
}

int count_bits(int version) { return version <= 9 ? 8 : 16; }

int ec_format_bits(EcLevel ec) {
  switch (ec) {
    case EcLevel::L: return 1;
    case EcLevel::M: return 0;
    case EcLevel::Q: return 3;
    case EcLevel::H: return 2;
  }
  return 0;
}

// Function-pattern painter shared by encoder and layout builder.
struct Canvas {
  int side;
  std::vector<std::uint8_t> dark, function;

  explicit Canvas(int s) : side(s), dark(static_cast<std::size_t>(s) * s, 0), function(static_cast<std::size_t>(s) * s, 0) {}
  void set(int x, int y, bool d) {
    dark[std::size_t(y) * side + x] = d;
    function[std::size_t(y) * side + x] = 1;
  }
};

void draw_function_patterns(Canvas& c, const QrSpec& spec) {
  const int side = c.side;
  for (int i = 0; i < side; ++i) {
    c.set(6, i, i % 2 == 0);
    c.set(i, 6, i % 2 == 0);
  }
  auto finder = [&](int cx, int cy) {
    for (int dy = -4; dy <= 4; ++dy)
      for (int dx = -4; dx <= 4; ++dx) {
        int x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= side || y >= side) continue;
        int dist = std::max(std::abs(dx), std::abs(dy));
        c.set(x, y, dist != 2 && dist != 4);
      }
  };
  finder(3, 3);
  finder(side - 4, 3);
  finder(3, side - 4);

  auto align = alignment_positions(spec.version);
  const int n = int(align.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if ((i == 0 && j == 0) || (i == 0 && j == n - 1) || (i == n - 1 && j == 0)) continue;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
          c.set(align[i] + dx, align[j] + dy, std::max(std::abs(dx), std::abs(dy)) != 1);
    }

  // Format areas (values written later) and the fixed dark module.
  std::uint16_t fmt = format_bits(spec.ec, spec.mask);
  auto bit = [](std::uint32_t v, int i) { return ((v >> i) & 1U) != 0; };
  for (int i = 0; i <= 5; ++i) c.set(8, i, bit(fmt, i));
  c.set(8, 7, bit(fmt, 6));
  c.set(8, 8, bit(fmt, 7));
  c.set(7, 8, bit(fmt, 8));
  for (int i = 9; i < 15; ++i) c.set(14 - i, 8, bit(fmt, i));
  for (int i = 0; i < 8; ++i) c.set(side - 1 - i, 8, bit(fmt, i));
  for (int i = 8; i < 15; ++i) c.set(8, side - 15 + i, bit(fmt, i));
  c.set(8, side - 8, true);

  if (spec.version >= 7) {
    std::uint32_t vb = version_bits(spec.version);
    for (int i = 0; i < 18; ++i) {
      bool b = bit(vb, i);
      int a = side - 11 + i % 3, d = i / 3;
      c.set(a, d, b);
      c.set(d, a, b);
    }
  }
}

// Module indices in codeword placement order (zigzag from bottom-right).
std::vector<int> placement_order(const Canvas& c) {
  std::vector<int> order;
  const int side = c.side;
  for (int right = side - 1; right >= 1; right -= 2) {
    if (right == 6) right = 5;
    for (int vert = 0; vert < side; ++vert)
      for (int j = 0; j < 2; ++j) {
        int x = right - j;
        bool upward = ((right + 1) & 2) == 0;
        int y = upward ? side - 1 - vert : vert;
        if (!c.function[std::size_t(y) * side + x]) order.push_back(y * side + x);
      }
  }
  return order;
}

class BitWriter {
 public:
  void put(std::uint32_t value, int bits) {
    for (int i = bits - 1; i >= 0; --i) bits_.push_back((value >> i) & 1U);
  }
  std::size_t size() const { return bits_.size(); }
  std::vector<std::uint8_t> bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out[i / 8] |= std::uint8_t(0x80 >> (i % 8));
    return out;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::size_t remaining() const { return bytes_.size() * 8 - pos_; }
  std::uint32_t get(int bits) {
    std::uint32_t v = 0;
    for (int i = 0; i < bits; ++i, ++pos_) v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U);
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

char to_char(EcLevel level) { return "LMQH"[int(level)]; }

EcLevel parse_ec_level(std::string_view text) {
  if (text == "L" || text == "l") return EcLevel::L;
  if (text == "M" || text == "m") return EcLevel::M;
  if (text == "Q" || text == "q") return EcLevel::Q;
  if (text == "H" || text == "h") return EcLevel::H;
  throw Error(ErrorCode::InvalidArgument, "unknown EC level: " + std::string(text));
}

void QrSpec::validate() const {
  if (version < kMinVersion || version > kMaxVersion)
    throw Error(ErrorCode::VersionUnsupported, "version must be 1..10, got " + std::to_string(version));
  if (mask < 0 || mask > 7) throw Error(ErrorCode::InvalidArgument, "mask must be 0..7");
}

BlockGeometry block_geometry(int version, EcLevel ec) {
  QrSpec{version, ec, 0}.validate();
  BlockGeometry g;
  g.num_blocks = kNumBlocks[int(ec)][version];
  g.ecc_per_block = kEccPerBlock[int(ec)][version];
  g.total_codewords = raw_data_modules(version) / 8;
  g.num_short = g.num_blocks - g.total_codewords % g.num_blocks;
  g.short_data_len = g.total_codewords / g.num_blocks - g.ecc_per_block;
  return g;
}

int byte_capacity(int version, EcLevel ec) {
  int bits = block_geometry(version, ec).total_data() * 8 - 4 - count_bits(version);
  return std::max(0, bits / 8);
}

std::optional<int> min_version(int length, EcLevel ec) {
  for (int v = kMinVersion; v <= kMaxVersion; ++v)
    if (byte_capacity(v, ec) >= length) return v;
  return std::nullopt;
}

std::uint16_t format_bits(EcLevel ec, int mask) {
  std::uint32_t data = std::uint32_t(ec_format_bits(ec) << 3 | mask);
  std::uint32_t rem = data;
  for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
  return std::uint16_t(((data << 10) | rem) ^ 0x5412);
}

std::uint32_t version_bits(int version) {
  std::uint32_t rem = std::uint32_t(version);
  for (int i = 0; i < 12; ++i) rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
  return std::uint32_t(version) << 12 | rem;
}

bool mask_bit(int mask, int x, int y) {
  switch (mask) {
    case 0: return (x + y) % 2 == 0;
    case 1: return y % 2 == 0;
    case 2: return x % 3 == 0;
    case 3: return (x + y) % 3 == 0;
    case 4: return (x / 3 + y / 2) % 2 == 0;
    case 5: return x * y % 2 + x * y % 3 == 0;
    case 6: return (x * y % 2 + x * y % 3) % 2 == 0;
    case 7: return ((x + y) % 2 + x * y % 3) % 2 == 0;
  }
  throw Error(ErrorCode::InvalidArgument, "mask must be 0..7");
}

SymbolLayout symbol_layout(const QrSpec& spec) {
  spec.validate();
  SymbolLayout layout;
  layout.spec = spec;
  layout.geometry = block_geometry(spec.version, spec.ec);
  Canvas canvas(spec.side());
  draw_function_patterns(canvas, spec);
  layout.function = canvas.function;

  auto order = placement_order(canvas);
  const auto& g = layout.geometry;
  layout.blocks.resize(static_cast<std::size_t>(g.num_blocks));
  for (int b = 0; b < g.num_blocks; ++b) layout.blocks[b].assign(static_cast<std::size_t>(g.block_len(b)) * 8, -1);

  // Interleaved codeword sequence: data column-wise across blocks, then check codewords.
  std::size_t bit = 0;
  auto place = [&](int b, int cw) {
    for (int i = 0; i < 8; ++i) layout.blocks[b][std::size_t(cw) * 8 + i] = order[bit++];
  };
  const int max_data = g.short_data_len + (g.num_short < g.num_blocks ? 1 : 0);
  for (int i = 0; i < max_data; ++i)
    for (int b = 0; b < g.num_blocks; ++b)
      if (i < g.data_len(b)) place(b, i);
  for (int i = 0; i < g.ecc_per_block; ++i)
    for (int b = 0; b < g.num_blocks; ++b) place(b, g.data_len(b) + i);
  layout.remainder.assign(order.begin() + std::ptrdiff_t(bit), order.end());
  return layout;
}

std::pair<int, int> EncodedSymbol::padding_range(int block) const {
  auto g = block_geometry(spec.version, spec.ec);
  int offset = 0;
  for (int b = 0; b < block; ++b) offset += g.data_len(b);
  int len = g.data_len(block);
  int first = std::clamp(message_codewords - offset, 0, len);
  return {first, len};
}

ModuleMatrix place_blocks(const QrSpec& spec, std::span<const gf::RsBlock> blocks,
                          int message_codewords) {
  auto layout = symbol_layout(spec);
  Canvas canvas(spec.side());
  draw_function_patterns(canvas, spec);

  ModuleMatrix m(spec.side());
  std::vector<ModuleRole> roles(static_cast<std::size_t>(spec.side()) * spec.side(), ModuleRole::Function);
  for (int i = 0; i < int(canvas.dark.size()); ++i)
    if (canvas.function[i] && canvas.dark[i]) m.flip_at(i);

  const auto& g = layout.geometry;
  int offset = 0;
  for (int b = 0; b < g.num_blocks; ++b) {
    const auto& cw = blocks[std::size_t(b)].codewords;
    for (std::size_t i = 0; i < layout.blocks[b].size(); ++i) {
      int idx = layout.blocks[b][i];
      int codeword = int(i / 8);
      bool bit = (cw[std::size_t(codeword)] >> (7 - i % 8)) & 1U;
      if (bit) m.flip_at(idx);
      if (codeword >= g.data_len(b)) roles[idx] = ModuleRole::Ecc;
      else if (offset + codeword < message_codewords) roles[idx] = ModuleRole::Message;
      else roles[idx] = ModuleRole::Padding;
    }
    offset += g.data_len(b);
  }
  for (int idx : layout.remainder) roles[idx] = ModuleRole::Remainder;
  m.set_roles(std::move(roles));
  apply_mask(m, layout, spec.mask);
  return m;
}

void apply_mask(ModuleMatrix& matrix, const SymbolLayout& layout, int mask) {
  const int side = matrix.side();
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (!layout.function[std::size_t(y) * side + x] && mask_bit(mask, x, y)) matrix.flip(x, y);
}

EncodedSymbol encode(const Payload& payload, const QrSpec& spec) {
  spec.validate();
  auto g = block_geometry(spec.version, spec.ec);
  const int capacity_bits = g.total_data() * 8;
  const int cc_bits = count_bits(spec.version);
  if (int(payload.bytes.size()) > byte_capacity(spec.version, spec.ec))
    throw Error(ErrorCode::CapacityExceeded,
                std::to_string(payload.bytes.size()) + " bytes exceed capacity " +
                    std::to_string(byte_capacity(spec.version, spec.ec)) + " of version " +
                    std::to_string(spec.version) + "-" + to_char(spec.ec));

  BitWriter w;
  w.put(0b0100, 4);
  w.put(std::uint32_t(payload.bytes.size()), cc_bits);
  for (auto b : payload.bytes) w.put(b, 8);
  w.put(0, std::min<int>(4, capacity_bits - int(w.size())));
  w.put(0, int((8 - w.size() % 8) % 8));

  auto data = w.bytes();
  const int message_codewords = int(data.size());
  for (std::uint8_t fill = 0xEC; int(data.size()) < g.total_data(); fill ^= 0xEC ^ 0x11)
    data.push_back(fill);

  EncodedSymbol sym;
  sym.spec = spec;
  sym.payload = payload;
  sym.message_codewords = message_codewords;
  int offset = 0;
  for (int b = 0; b < g.num_blocks; ++b) {
    auto chunk = std::span(data).subspan(static_cast<std::size_t>(offset), std::size_t(g.data_len(b)));
    sym.blocks.push_back(gf::rs_encode(chunk, g.ecc_per_block));
    offset += g.data_len(b);
  }
  sym.matrix = place_blocks(spec, sym.blocks, message_codewords);
  return sym;
}

ModuleMatrix encode_symbol(const Payload& payload, const QrSpec& spec) {
  return encode(payload, spec).matrix;
}

std::vector<std::uint8_t> controllable_map(const QrSpec& spec, const Payload& payload) {
  auto sym = encode(payload, spec);
  std::vector<std::uint8_t> map(static_cast<std::size_t>(spec.side()) * spec.side(), 0);
  for (int i = 0; i < int(map.size()); ++i)
    map[i] = sym.matrix.role_at(i) == ModuleRole::Padding ? 1 : 0;
  return map;
}

namespace {

FormatInfo read_format(const ModuleMatrix& m) {
  const int side = m.side();
  std::uint32_t a = 0, b = 0;
  auto put = [](std::uint32_t& v, int i, bool bit) { if (bit) v |= 1U << i; };
  for (int i = 0; i <= 5; ++i) put(a, i, m.dark(8, i));
  put(a, 6, m.dark(8, 7));
  put(a, 7, m.dark(8, 8));
  put(a, 8, m.dark(7, 8));
  for (int i = 9; i < 15; ++i) put(a, i, m.dark(14 - i, 8));
  for (int i = 0; i < 8; ++i) put(b, i, m.dark(side - 1 - i, 8));
  for (int i = 8; i < 15; ++i) put(b, i, m.dark(8, side - 15 + i));

  int best = 99;
  FormatInfo info{EcLevel::M, 0};
  for (int ec = 0; ec < 4; ++ec)
    for (int mask = 0; mask < 8; ++mask) {
      std::uint32_t code = format_bits(EcLevel(ec), mask);
      int d = std::min(std::popcount(code ^ a), std::popcount(code ^ b));
      if (d < best) {
        best = d;
        info = {EcLevel(ec), mask};
      }
    }
  if (best > 3) throw Error(ErrorCode::FormatInfoUnreadable, "format information unreadable");
  return info;
}

std::vector<std::uint8_t> parse_segments(std::span<const std::uint8_t> data, int version) {
  BitReader r(data);
  std::vector<std::uint8_t> out;
  while (r.remaining() >= 4) {
    std::uint32_t mode = r.get(4);
    if (mode == 0) break;
    if (mode != 0b0100)
      throw Error(ErrorCode::InvalidArgument, "unsupported segment mode " + std::to_string(mode));
    int cc = count_bits(version);
    if (int(r.remaining()) < cc) throw Error(ErrorCode::UncorrectableBlock, "truncated segment header");
    std::uint32_t count = r.get(cc);
    if (r.remaining() < std::size_t(count) * 8)
      throw Error(ErrorCode::UncorrectableBlock, "segment longer than data");
    for (std::uint32_t i = 0; i < count; ++i) out.push_back(std::uint8_t(r.get(8)));
  }
  return out;
}

}  // namespace

Decoded decode_matrix(const ModuleMatrix& matrix) {
  const int side = matrix.side();
  if (side < 21 || (side - 17) % 4 != 0 || (side - 17) / 4 > kMaxVersion)
    throw Error(ErrorCode::VersionUnsupported, "unsupported symbol side " + std::to_string(side));
  const int version = (side - 17) / 4;
  auto fmt = read_format(matrix);
  QrSpec spec{version, fmt.ec, fmt.mask};
  auto layout = symbol_layout(spec);

  ModuleMatrix unmasked = matrix;
  apply_mask(unmasked, layout, fmt.mask);

  const auto& g = layout.geometry;
  Decoded result;
  result.spec = spec;
  std::vector<std::uint8_t> data;
  for (int b = 0; b < g.num_blocks; ++b) {
    gf::RsBlock block;
    block.ecc_len = g.ecc_per_block;
    block.codewords.assign(static_cast<std::size_t>(g.block_len(b)), 0);
    for (std::size_t i = 0; i < layout.blocks[b].size(); ++i)
      if (unmasked.dark_at(layout.blocks[b][i])) block.codewords[i / 8] |= std::uint8_t(0x80 >> (i % 8));
    auto dec = gf::rs_decode(block);
    result.block_corrections.push_back(dec.corrected);
    result.corrections += dec.corrected;
    data.insert(data.end(), dec.data.begin(), dec.data.end());
  }
  result.payload.bytes = parse_segments(data, version);
  return result;
}

int default_module_px(int side, int target, int quiet_zone) {
  return std::max(1, target / (side + 2 * quiet_zone));
}

PixelGrid render(const ModuleMatrix& matrix, int module_px, int quiet_zone) {
  const int total = (matrix.side() + 2 * quiet_zone) * module_px;
  PixelGrid img = PixelGrid::gray(total, total, 255);
  for (int my = 0; my < matrix.side(); ++my)
    for (int mx = 0; mx < matrix.side(); ++mx) {
      if (!matrix.dark(mx, my)) continue;
      for (int dy = 0; dy < module_px; ++dy)
        for (int dx = 0; dx < module_px; ++dx)
          img.at((mx + quiet_zone) * module_px + dx, (my + quiet_zone) * module_px + dy) = 0;
    }
  return img;
}

std::string to_pbm(const ModuleMatrix& matrix) {
  std::ostringstream os;
  os << "P1\n" << matrix.side() << ' ' << matrix.side() << '\n';
  for (int y = 0; y < matrix.side(); ++y) {
    for (int x = 0; x < matrix.side(); ++x) os << (x ? " " : "") << (matrix.dark(x, y) ? '1' : '0');
    os << '\n';
  }
  return os.str();
}

ModuleMatrix from_pbm(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string magic;
  is >> magic;
  if (magic != "P1") throw Error(ErrorCode::Io, "not a plain PBM (P1) file");
  auto skip_comments = [&] {
    is >> std::ws;
    while (is.peek() == '#') {
      std::string line;
      std::getline(is, line);
      is >> std::ws;
    }
  };
  int w = 0, h = 0;
  skip_comments();
  is >> w;
  skip_comments();
  is >> h;
  if (!is || w != h || w <= 0) throw Error(ErrorCode::Io, "PBM must be square");
  ModuleMatrix m(w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      skip_comments();
      char c = 0;
      is >> c;
      if (c != '0' && c != '1') throw Error(ErrorCode::Io, "truncated PBM data");
      m.set_dark(x, y, c == '1');
    }
  return m;
}

ModuleMatrix from_rendered(const PixelGrid& image, int quiet_zone) {
  if (image.width() != image.height()) throw Error(ErrorCode::DimensionMismatch, "rendered symbol must be square");
  for (int v = kMinVersion; v <= kMaxVersion; ++v) {
    int units = 4 * v + 17 + 2 * quiet_zone;
    if (image.width() % units) continue;
    int px = image.width() / units;
    ModuleMatrix m(4 * v + 17);
    for (int y = 0; y < m.side(); ++y)
      for (int x = 0; x < m.side(); ++x) {
        int cx = (x + quiet_zone) * px + px / 2, cy = (y + quiet_zone) * px + px / 2;
        int lum = image.is_gray() ? image.at(cx, cy)
                                  : (image.at(cx, cy, 0) + image.at(cx, cy, 1) + image.at(cx, cy, 2)) / 3;
        m.set_dark(x, y, lum < 128);
      }
    return m;
  }
  throw Error(ErrorCode::DimensionMismatch, "image size does not match any rendered symbol");
}

}  // namespace artup::qr
