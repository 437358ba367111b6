#pragma once

#include <opencv2/core.hpp>

#include "artup/image.hpp"

namespace artup::detail {

// Non-owning view; valid while `image` lives.
inline cv::Mat as_mat(const PixelGrid& image) {
  return cv::Mat(image.height(), image.width(), image.is_gray() ? CV_8UC1 : CV_8UC3,
                 const_cast<std::uint8_t*>(image.bytes().data()));
}

// Copies an 8-bit 1- or 3-channel matrix without reordering channels.
inline PixelGrid copy_mat(const cv::Mat& m) {
  PixelGrid out(m.cols, m.rows, m.channels());
  cv::Mat dst = as_mat(out);
  m.copyTo(dst);
  return out;
}

}  // namespace artup::detail
