#include "artup/imageprep.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "cv_view.hpp"

namespace artup::imageprep {

namespace {

int module_side_px(const PixelGrid& image, int side) {
  if (side <= 0 || image.width() != image.height() || image.width() % side != 0 || image.width() == 0)
    throw Error(ErrorCode::DimensionMismatch,
                "image must be a square whose side is a multiple of " + std::to_string(side));
  return image.width() / side;
}

void scale_to_unit(Grid<double>& g) {
  auto v = g.values();
  if (v.empty()) return;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double min = *lo, range = *hi - *lo;
  for (auto& x : v) x = range > 0 ? (x - min) / range : 0.0;
}

}  // namespace

double luma_exact(Rgb c) { return kLumaR * c.r + kLumaG * c.g + kLumaB * c.b; }

std::uint8_t luma(Rgb c) {
  return std::uint8_t(std::clamp(std::lround(luma_exact(c)), 0L, 255L));
}

PixelGrid to_grayscale(const PixelGrid& image) {
  if (image.is_gray()) return image;
  PixelGrid out = PixelGrid::gray(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) out.at(x, y) = luma(image.rgb_at(x, y));
  return out;
}

std::vector<double> module_weights(int a) {
  if (a < 1) throw Error(ErrorCode::InvalidArgument, "module side must be positive");
  std::vector<double> w(static_cast<std::size_t>(a) * a, 1.0);
  const double sigma = (a - 1) / 5.0;
  if (sigma > 0) {
    const double c = a / 2.0;
    for (int j = 0; j < a; ++j)
      for (int i = 0; i < a; ++i) {
        double dx = i + 0.5 - c, dy = j + 0.5 - c;
        w[std::size_t(j) * a + i] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      }
  }
  double sum = 0;
  for (double x : w) sum += x;
  for (auto& x : w) x /= sum;
  return w;
}

Grid<std::uint8_t> module_binarize(const PixelGrid& gray, int side) {
  if (!gray.is_gray()) throw Error(ErrorCode::DimensionMismatch, "module_binarize expects a gray image");
  const int a = module_side_px(gray, side);
  const auto w = module_weights(a);
  Grid<std::uint8_t> out(side, side);
  for (int my = 0; my < side; ++my)
    for (int mx = 0; mx < side; ++mx) {
      double mean = 0;
      for (int j = 0; j < a; ++j)
        for (int i = 0; i < a; ++i) mean += w[std::size_t(j) * a + i] * gray.at(mx * a + i, my * a + j);
      out(mx, my) = mean >= 127.5 ? 1 : 0;
    }
  return out;
}

double heuristic(double x, double y, int side) {
  const double c = side / 2.0;
  double h = 1.0 - ((x - c) * (x - c) + (y - c) * (y - c)) / (side * side / 2.0);
  return std::max(0.0, h);
}

Grid<double> mean_pool(const Grid<double>& pixels, int side) {
  if (side <= 0 || pixels.width() != pixels.height() || pixels.width() % side != 0)
    throw Error(ErrorCode::DimensionMismatch, "map is not a multiple of the module grid");
  const int a = pixels.width() / side;
  Grid<double> out(side, side);
  for (int y = 0; y < pixels.height(); ++y)
    for (int x = 0; x < pixels.width(); ++x) out(x / a, y / a) += pixels(x, y);
  for (auto& v : out.values()) v /= double(a) * a;
  return out;
}

Grid<double> canny_edges(const PixelGrid& image) {
  PixelGrid gray = to_grayscale(image);
  cv::Mat blurred, edges;
  cv::GaussianBlur(detail::as_mat(gray), blurred, cv::Size(0, 0), 1.4);
  cv::Canny(blurred, edges, 50, 150, 3, true);
  Grid<double> px(image.width(), image.height());
  for (int y = 0; y < edges.rows; ++y)
    for (int x = 0; x < edges.cols; ++x) px(x, y) = edges.at<std::uint8_t>(y, x) ? 1.0 : 0.0;
  return px;
}

Grid<double> edge_map(const PixelGrid& image, int side) {
  module_side_px(image, side);
  auto pooled = mean_pool(canny_edges(image), side);
  double hi = *std::max_element(pooled.values().begin(), pooled.values().end());
  if (hi > 0)
    for (auto& v : pooled.values()) v /= hi;
  return pooled;
}

Grid<double> pixel_saliency(const PixelGrid& image) {
  constexpr int kLevels = 12;
  constexpr int kBins = kLevels * kLevels * kLevels;
  PixelGrid rgb = to_rgb(image);
  cv::Mat as_float, lab;
  detail::as_mat(rgb).convertTo(as_float, CV_32FC3, 1.0 / 255.0);
  cv::cvtColor(as_float, lab, cv::COLOR_RGB2Lab);

  const int w = rgb.width(), h = rgb.height();
  std::vector<int> bin_of(static_cast<std::size_t>(w) * h);
  std::vector<double> count(kBins, 0.0);
  std::vector<std::array<double, 3>> mean_lab(kBins, {0, 0, 0});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Rgb c = rgb.rgb_at(x, y);
      int bin = (c.r * kLevels / 256) * kLevels * kLevels + (c.g * kLevels / 256) * kLevels + c.b * kLevels / 256;
      bin_of[std::size_t(y) * w + x] = bin;
      auto v = lab.at<cv::Vec3f>(y, x);
      count[std::size_t(bin)] += 1;
      for (int k = 0; k < 3; ++k) mean_lab[std::size_t(bin)][std::size_t(k)] += v[k];
    }

  std::vector<int> present;
  for (int b = 0; b < kBins; ++b)
    if (count[std::size_t(b)] > 0) {
      for (auto& m : mean_lab[std::size_t(b)]) m /= count[std::size_t(b)];
      present.push_back(b);
    }
  const double total = double(w) * h;
  std::vector<double> bin_sal(kBins, 0.0);
  for (int i : present)
    for (int j : present) {
      const auto& p = mean_lab[std::size_t(i)];
      const auto& q = mean_lab[std::size_t(j)];
      double d = std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[2] - q[2]));
      bin_sal[std::size_t(i)] += count[std::size_t(j)] / total * d;
    }

  Grid<double> out(w, h);
  for (std::size_t i = 0; i < bin_of.size(); ++i) out[i] = bin_sal[std::size_t(bin_of[i])];
  scale_to_unit(out);
  return out;
}

Grid<double> saliency_map(const PixelGrid& image, int side) {
  module_side_px(image, side);
  auto pooled = mean_pool(pixel_saliency(image), side);
  scale_to_unit(pooled);
  return pooled;
}

Grid<double> combine(const Grid<double>& edge, const Grid<double>& saliency,
                     const Grid<double>& heuristic, const PriorityWeights& lambda) {
  if (edge.width() != saliency.width() || edge.width() != heuristic.width() ||
      edge.height() != saliency.height() || edge.height() != heuristic.height())
    throw Error(ErrorCode::DimensionMismatch, "priority components differ in size");
  Grid<double> w(edge.width(), edge.height());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = lambda.edge * edge[i] + lambda.saliency * saliency[i] + lambda.heuristic * heuristic[i];
  return w;
}

PriorityMap priority_map(const PixelGrid& image, int side, const PriorityWeights& lambda) {
  PriorityMap out;
  out.edge = edge_map(image, side);
  out.saliency = saliency_map(image, side);
  out.heuristic = Grid<double>(side, side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) out.heuristic(x, y) = heuristic(x, y, side);
  out.w = combine(out.edge, out.saliency, out.heuristic, lambda);
  return out;
}

}  // namespace artup::imageprep
