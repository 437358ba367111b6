#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artup/galois.hpp"
#include "artup/image.hpp"

namespace artup::qr {

inline constexpr int kMinVersion = 1;
inline constexpr int kMaxVersion = 10;
inline constexpr int kQuietZone = 4;

enum class EcLevel { L, M, Q, H };

char to_char(EcLevel level);
EcLevel parse_ec_level(std::string_view text);

struct QrSpec {
  int version = 1;
  EcLevel ec = EcLevel::M;
  int mask = 0;

  int side() const { return 4 * version + 17; }
  void validate() const;
  bool operator==(const QrSpec&) const = default;
};

/// Per-version/EC block structure: `num_short` blocks hold `short_data_len` data
/// codewords, the rest hold one more. Every block carries `ecc_per_block` check codewords.
struct BlockGeometry {
  int num_blocks = 0;
  int ecc_per_block = 0;
  int num_short = 0;
  int short_data_len = 0;
  int total_codewords = 0;

  int data_len(int block) const { return short_data_len + (block >= num_short ? 1 : 0); }
  int block_len(int block) const { return data_len(block) + ecc_per_block; }
  int total_data() const { return total_codewords - num_blocks * ecc_per_block; }
};

BlockGeometry block_geometry(int version, EcLevel ec);
/// Largest byte-mode payload that fits the version/EC pair.
int byte_capacity(int version, EcLevel ec);
/// Smallest supported version holding `length` bytes at `ec`; nullopt if none.
std::optional<int> min_version(int length, EcLevel ec);

enum class ModuleRole : std::uint8_t { Function, Message, Padding, Ecc, Remainder };

/// l x l grid of modules. `dark` follows the QR convention (1 = dark). Role tags are
/// present for generated symbols and absent for sampled grids.
class ModuleMatrix {
 public:
  ModuleMatrix() = default;
  explicit ModuleMatrix(int side) : side_(side), dark_(static_cast<std::size_t>(side) * side, 0) {}

  int side() const { return side_; }
  bool dark(int x, int y) const { return dark_[index(x, y)] != 0; }
  void set_dark(int x, int y, bool v) { dark_[index(x, y)] = v ? 1 : 0; }
  void flip(int x, int y) { dark_[index(x, y)] ^= 1; }
  bool dark_at(int idx) const { return dark_[std::size_t(idx)] != 0; }
  void flip_at(int idx) { dark_[std::size_t(idx)] ^= 1; }

  bool has_roles() const { return !roles_.empty(); }
  ModuleRole role(int x, int y) const { return roles_[index(x, y)]; }
  ModuleRole role_at(int idx) const { return roles_[std::size_t(idx)]; }
  void set_roles(std::vector<ModuleRole> roles) { roles_ = std::move(roles); }

  std::span<const std::uint8_t> cells() const { return dark_; }

  int index(int x, int y) const { return y * side_ + x; }

  /// Equality of the module colors only.
  bool same_modules(const ModuleMatrix& other) const {
    return side_ == other.side_ && dark_ == other.dark_;
  }

 private:
  int side_ = 0;
  std::vector<std::uint8_t> dark_;
  std::vector<ModuleRole> roles_;
};

struct Payload {
  std::vector<std::uint8_t> bytes;

  static Payload from_string(std::string_view text) {
    return Payload{std::vector<std::uint8_t>(text.begin(), text.end())};
  }
  std::string text() const { return std::string(bytes.begin(), bytes.end()); }
  bool operator==(const Payload&) const = default;
};

/// Where every codeword bit lands: blocks[b][i] is the module index of bit i of block b
/// (data codewords first, then check codewords; MSB first within a codeword).
struct SymbolLayout {
  QrSpec spec;
  BlockGeometry geometry;
  std::vector<std::vector<int>> blocks;
  std::vector<std::uint8_t> function;  // per module
  std::vector<int> remainder;          // module indices of remainder bits

  int side() const { return spec.side(); }
};

/// Layout depends only on version (and EC level for block structure).
SymbolLayout symbol_layout(const QrSpec& spec);

struct EncodedSymbol {
  QrSpec spec;
  Payload payload;
  std::vector<gf::RsBlock> blocks;
  /// Codewords carrying mode, count, message and terminator bits, counted over the
  /// concatenated data stream. The rest are padding codewords.
  int message_codewords = 0;
  ModuleMatrix matrix;

  /// Padding codewords within block b as the half-open codeword range [first, last).
  std::pair<int, int> padding_range(int block) const;
};

/// Throws Error(CapacityExceeded) when the payload does not fit.
EncodedSymbol encode(const Payload& payload, const QrSpec& spec);
ModuleMatrix encode_symbol(const Payload& payload, const QrSpec& spec);

/// Rebuilds the module matrix from (possibly modified) RS blocks.
ModuleMatrix place_blocks(const QrSpec& spec, std::span<const gf::RsBlock> blocks,
                          int message_codewords);

/// Per-module flags of the bits belonging to padding codewords.
std::vector<std::uint8_t> controllable_map(const QrSpec& spec, const Payload& payload);

bool mask_bit(int mask, int x, int y);
/// XORs the data mask into every non-function module.
void apply_mask(ModuleMatrix& matrix, const SymbolLayout& layout, int mask);

struct FormatInfo {
  EcLevel ec;
  int mask;
};
std::uint16_t format_bits(EcLevel ec, int mask);
std::uint32_t version_bits(int version);

struct Decoded {
  Payload payload;
  QrSpec spec;
  int corrections = 0;
  std::vector<int> block_corrections;
};

/// Inverse of encode for a sampled or generated grid. Throws Error with
/// FormatInfoUnreadable, UncorrectableBlock or VersionUnsupported.
Decoded decode_matrix(const ModuleMatrix& matrix);

/// Raster of the symbol with a quiet zone; `module_px` pixels per module.
PixelGrid render(const ModuleMatrix& matrix, int module_px, int quiet_zone = kQuietZone);
/// Module size giving a roughly 512-pixel image including the quiet zone.
int default_module_px(int side, int target = 512, int quiet_zone = kQuietZone);

/// Plain PBM (P1) text, 1 = dark, one row per line, no quiet zone.
std::string to_pbm(const ModuleMatrix& matrix);
ModuleMatrix from_pbm(std::string_view text);
/// Reads back a rendered symbol produced by `render` (any module size).
ModuleMatrix from_rendered(const PixelGrid& image, int quiet_zone = kQuietZone);

}  // namespace artup::qr
