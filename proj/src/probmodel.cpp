#include "artup/probmodel.hpp"

#include <algorithm>
#include <cmath>

namespace artup::prob {

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_sigma(double sigma) {
  if (!(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
}

}  // namespace

double light_mass(double y, double t, double sigma2) {
  check_sigma(sigma2);
  return phi((y - t) / sigma2) - phi(-t / sigma2);
}

double dark_mass(double y, double t, double sigma2) {
  check_sigma(sigma2);
  return phi((255.0 - t) / sigma2) - phi((y - t) / sigma2);
}

double threshold_success_prob(double y, double t, Tone tone, double sigma2) {
  check_sigma(sigma2);
  const double lo = phi(-t / sigma2), mid = phi((y - t) / sigma2), hi = phi((255.0 - t) / sigma2);
  const double total = hi - lo;
  return tone == Tone::Light ? (mid - lo) / total : (hi - mid) / total;
}

std::uint8_t invert_threshold_prob(double target, double t, Tone tone, double sigma2) {
  // Light: p rises with y, want the smallest y with p(y) >= target.
  // Dark: p falls with y, want the largest such y.
  auto ok = [&](int y) { return threshold_success_prob(y, t, tone, sigma2) >= target; };
  if (tone == Tone::Light) {
    int lo = 0, hi = 255;
    if (ok(0)) return 0;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
    return std::uint8_t(hi);
  }
  int lo = 0, hi = 255;
  if (ok(255)) return 255;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return std::uint8_t(lo);
}

Grid<double> expected_threshold(const PixelGrid& gray, int window) {
  if (!gray.is_gray()) throw Error(ErrorCode::InvalidArgument, "expected_threshold needs a gray image");
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  const int w = gray.width(), h = gray.height();
  std::vector<std::int64_t> sum(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto s = [&](int x, int y) -> std::int64_t& { return sum[std::size_t(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) s(x + 1, y + 1) = gray.at(x, y) + s(x, y + 1) + s(x + 1, y) - s(x, y);

  Grid<double> out(w, h);
  const int back = window / 2;
  for (int y = 0; y < h; ++y) {
    int y0 = std::max(0, y - back), y1 = std::min(h, y - back + window);
    for (int x = 0; x < w; ++x) {
      int x0 = std::max(0, x - back), x1 = std::min(w, x - back + window);
      auto total = s(x1, y1) - s(x0, y1) - s(x1, y0) + s(x0, y0);
      out(x, y) = double(total) / (double(x1 - x0) * (y1 - y0));
    }
  }
  return out;
}

Grid<double> expected_threshold_naive(const PixelGrid& gray, int window) {
  const int w = gray.width(), h = gray.height(), back = window / 2;
  Grid<double> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double total = 0;
      int n = 0;
      for (int j = y - back; j < y - back + window; ++j)
        for (int i = x - back; i < x - back + window; ++i)
          if (i >= 0 && j >= 0 && i < w && j < h) {
            total += gray.at(i, j);
            ++n;
          }
      out(x, y) = total / n;
    }
  return out;
}

std::vector<double> sampling_prob_grid(int a, double sigma3) {
  if (a < 1) throw Error(ErrorCode::InvalidArgument, "module side must be positive");
  if (sigma3 <= 0) sigma3 = a / 6.0;
  std::vector<double> p(static_cast<std::size_t>(a) * a);
  const double c = a / 2.0;
  double sum = 0;
  for (int j = 0; j < a; ++j)
    for (int i = 0; i < a; ++i) {
      double dx = i + 0.5 - c, dy = j + 0.5 - c;
      double v = std::exp(-(dx * dx + dy * dy) / (2 * sigma3 * sigma3)) / (2 * M_PI * sigma3 * sigma3);
      p[std::size_t(j) * a + i] = v;
      sum += v;
    }
  for (auto& v : p) v /= sum;
  return p;
}

double module_success_prob(std::span<const double> ps, std::span<const double> pt) {
  if (ps.size() != pt.size()) throw Error(ErrorCode::DimensionMismatch, "sampling and threshold grids differ");
  double p = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) p += ps[i] * pt[i];
  return p;
}

Grid<double> module_probabilities(const PixelGrid& canvas, const CanvasLayout& layout,
                                  std::span<const Tone> tones, double sigma2, double sigma3) {
  if (canvas.width() != layout.canvas_px() || canvas.height() != layout.canvas_px() ||
      tones.size() != std::size_t(layout.side) * layout.side)
    throw Error(ErrorCode::DimensionMismatch, "canvas does not match the module layout");
  const int a = layout.a, o = layout.origin_px();
  const auto thresholds = expected_threshold(canvas, 3 * a);
  const auto ps = sampling_prob_grid(a, sigma3);
  Grid<double> out(layout.side, layout.side);
  for (int my = 0; my < layout.side; ++my)
    for (int mx = 0; mx < layout.side; ++mx) {
      Tone tone = tones[std::size_t(my) * layout.side + mx];
      double p = 0;
      for (int j = 0; j < a; ++j)
        for (int i = 0; i < a; ++i) {
          int x = o + mx * a + i, y = o + my * a + j;
          p += ps[std::size_t(j) * a + i] * threshold_success_prob(canvas.at(x, y), thresholds(x, y), tone, sigma2);
        }
      out(mx, my) = p;
    }
  return out;
}

}  // namespace artup::prob
