#include "artup/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cv_view.hpp"

namespace artup {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthViolation: return "LengthViolation";
    case ErrorCode::UncorrectableBlock: return "UncorrectableBlock";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::FormatInfoUnreadable: return "FormatInfoUnreadable";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::NoPaddingAvailable: return "NoPaddingAvailable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::DetectFailed: return "DetectFailed";
    case ErrorCode::VersionEstimateFailed: return "VersionEstimateFailed";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

PixelGrid::PixelGrid(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || (channels != 1 && channels != 3))
    throw Error(ErrorCode::InvalidArgument, "bad PixelGrid geometry");
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Rgb PixelGrid::rgb_at(int x, int y) const {
  if (channels_ == 1) {
    auto v = at(x, y);
    return {v, v, v};
  }
  return {at(x, y, 0), at(x, y, 1), at(x, y, 2)};
}

void PixelGrid::set_rgb(int x, int y, Rgb color) {
  if (channels_ == 1) {
    at(x, y) = color.r;
    return;
  }
  at(x, y, 0) = color.r;
  at(x, y, 1) = color.g;
  at(x, y, 2) = color.b;
}

namespace {

using detail::as_mat;

PixelGrid from_mat(const cv::Mat& mat) {
  cv::Mat m = mat;
  if (m.depth() == CV_16U) m.convertTo(m, CV_8U, 1.0 / 257.0);
  else if (m.depth() != CV_8U) m.convertTo(m, CV_8U);

  if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2RGB);
  else if (m.channels() == 3) cv::cvtColor(m, m, cv::COLOR_BGR2RGB);
  else if (m.channels() != 1) throw Error(ErrorCode::Io, "unsupported channel count");

  PixelGrid out(m.cols, m.rows, m.channels());
  cv::Mat dst = as_mat(out);
  m.copyTo(dst);
  return out;
}

cv::Mat to_bgr_mat(const PixelGrid& image) {
  if (image.is_gray()) return as_mat(image).clone();
  cv::Mat bgr;
  cv::cvtColor(as_mat(image), bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

}  // namespace

PixelGrid read_image(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw Error(ErrorCode::Io, "cannot read image: " + path.string());
  return from_mat(m);
}

PixelGrid decode_image(std::span<const std::uint8_t> encoded) {
  cv::Mat buf(1, int(encoded.size()), CV_8UC1, const_cast<std::uint8_t*>(encoded.data()));
  cv::Mat m = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw Error(ErrorCode::Io, "cannot decode image bytes");
  return from_mat(m);
}

std::vector<std::uint8_t> encode_png(const PixelGrid& image) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", to_bgr_mat(image), out))
    throw Error(ErrorCode::Io, "PNG encoding failed");
  return out;
}

void write_png(const std::filesystem::path& path, const PixelGrid& image) {
  if (!cv::imwrite(path.string(), to_bgr_mat(image)))
    throw Error(ErrorCode::Io, "cannot write image: " + path.string());
}

PixelGrid to_rgb(const PixelGrid& image) {
  if (!image.is_gray()) return image;
  PixelGrid out = PixelGrid::rgb(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) out.set_rgb(x, y, image.rgb_at(x, y));
  return out;
}

PixelGrid center_square(const PixelGrid& image) {
  int side = std::min(image.width(), image.height());
  int x0 = (image.width() - side) / 2, y0 = (image.height() - side) / 2;
  PixelGrid out(side, side, image.channels());
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = image.at(x0 + x, y0 + y, c);
  return out;
}

PixelGrid resize_bicubic(const PixelGrid& image, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "resize to empty size");
  if (width == image.width() && height == image.height()) return image;
  PixelGrid out(width, height, image.channels());
  cv::Mat dst = as_mat(out);
  cv::resize(as_mat(image), dst, cv::Size(width, height), 0, 0, cv::INTER_CUBIC);
  return out;
}

PixelGrid pad(const PixelGrid& image, int margin, std::uint8_t fill) {
  PixelGrid out(image.width() + 2 * margin, image.height() + 2 * margin, image.channels(), fill);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < image.channels(); ++c)
        out.at(x + margin, y + margin, c) = image.at(x, y, c);
  return out;
}

double psnr(const PixelGrid& a, const PixelGrid& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
    throw Error(ErrorCode::DimensionMismatch, "psnr: shape mismatch");
  double se = 0;
  auto pa = a.bytes(), pb = b.bytes();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    double d = double(pa[i]) - double(pb[i]);
    se += d * d;
  }
  if (se == 0) return std::numeric_limits<double>::infinity();
  double mse = se / double(pa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace artup
