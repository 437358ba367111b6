#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "artup/error.hpp"

namespace artup {

/// Dense row-major 2-D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), values_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  T& operator()(int x, int y) { return values_[std::size_t(y) * width_ + x]; }
  const T& operator()(int x, int y) const { return values_[std::size_t(y) * width_ + x]; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// 8-bit raster with one (gray) or three (RGB, interleaved) channels.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int height, int channels, std::uint8_t fill = 0);

  static PixelGrid gray(int width, int height, std::uint8_t fill = 0) {
    return PixelGrid(width, height, 1, fill);
  }
  static PixelGrid rgb(int width, int height, std::uint8_t fill = 0) {
    return PixelGrid(width, height, 3, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  bool is_gray() const { return channels_ == 1; }

  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  Rgb rgb_at(int x, int y) const;
  void set_rgb(int x, int y, Rgb color);

  std::span<std::uint8_t> bytes() { return data_; }
  std::span<const std::uint8_t> bytes() const { return data_; }

  bool operator==(const PixelGrid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

/// Reads PNG/JPEG/PPM/PGM. Gray files stay single-channel; color files become RGB.
PixelGrid read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const PixelGrid& image);
std::vector<std::uint8_t> encode_png(const PixelGrid& image);
PixelGrid decode_image(std::span<const std::uint8_t> encoded);

/// Three-channel copy (gray replicated).
PixelGrid to_rgb(const PixelGrid& image);
/// Largest centered square crop.
PixelGrid center_square(const PixelGrid& image);
/// Bicubic resample to the given size.
PixelGrid resize_bicubic(const PixelGrid& image, int width, int height);
/// Pads with a constant border of `margin` pixels on every side.
PixelGrid pad(const PixelGrid& image, int margin, std::uint8_t fill);

/// Peak signal-to-noise ratio in dB; infinity for identical inputs.
double psnr(const PixelGrid& a, const PixelGrid& b);

}  // namespace artup
