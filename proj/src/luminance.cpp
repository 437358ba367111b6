#include "artup/luminance.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "artup/imageprep.hpp"

namespace artup::lum {

namespace {

constexpr double kSlack = 1e-12;

}  // namespace

ModifyResult modify_module(std::span<std::uint8_t> y, std::span<const double> t, std::span<const double> ps,
                           std::span<double> varpi, double eta, prob::Tone tone, double sigma2) {
  const std::size_t n = y.size();
  if (t.size() != n || ps.size() != n || varpi.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "module spans differ in size");

  std::vector<double> pt(n), start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = pt[i] = prob::threshold_success_prob(y[i], t[i], tone, sigma2);

  ModifyResult r;
  r.initial_prob = prob::module_success_prob(ps, pt);
  double p = r.initial_prob;
  // Each pass either reaches eta or saturates at least one pixel, so n + 1 passes suffice.
  for (std::size_t pass = 0; pass <= n + 1; ++pass) {
    if (p >= eta - kSlack) break;
    double budget = 0;
    for (std::size_t i = 0; i < n; ++i) budget += ps[i] * varpi[i];
    if (budget <= 0) {
      r.exhausted = true;
      break;
    }
    const double deficit = std::max(eta, p) - p;
    for (std::size_t i = 0; i < n; ++i) {
      pt[i] += deficit * varpi[i] / budget;
      if (pt[i] >= 1.0) {
        pt[i] = 1.0;
        varpi[i] = 0;
      }
    }
    p = prob::module_success_prob(ps, pt);
  }
  r.final_prob = p;

  for (std::size_t i = 0; i < n; ++i) {
    if (pt[i] <= start[i]) continue;
    auto g = prob::invert_threshold_prob(pt[i], t[i], tone, sigma2);
    if (g != y[i]) {
      y[i] = g;
      ++r.changed;
    }
  }
  return r;
}

VarpiPreset parse_varpi_preset(std::string_view name) {
  if (name == "gaussian") return VarpiPreset::Gaussian;
  if (name == "constant") return VarpiPreset::Constant;
  if (name == "random") return VarpiPreset::Random;
  if (name == "image") return VarpiPreset::Image;
  if (name == "center") return VarpiPreset::Center;
  if (name == "edge") return VarpiPreset::GaussianEdge;
  throw Error(ErrorCode::InvalidArgument, "unknown omega preset: " + std::string(name));
}

std::string to_string(VarpiPreset preset) {
  switch (preset) {
    case VarpiPreset::Gaussian: return "gaussian";
    case VarpiPreset::Constant: return "constant";
    case VarpiPreset::Random: return "random";
    case VarpiPreset::Image: return "image";
    case VarpiPreset::Center: return "center";
    case VarpiPreset::GaussianEdge: return "edge";
  }
  return "gaussian";
}

Grid<double> make_varpi(const VarpiOptions& options, int side, int a, const PixelGrid& image) {
  const int n = side * a;
  Grid<double> out(n, n, 1.0);
  auto tile = [&](const std::vector<double>& cell) {
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) out(x, y) = cell[std::size_t(y % a) * a + x % a];
  };

  switch (options.preset) {
    case VarpiPreset::Gaussian:
      tile(prob::sampling_prob_grid(a, options.sigma3));
      break;
    case VarpiPreset::Constant:
      break;
    case VarpiPreset::Random: {
      std::mt19937_64 rng(options.seed);
      for (auto& v : out.values()) v = double(rng() >> 11) * 0x1.0p-53;
      break;
    }
    case VarpiPreset::Image: {
      auto mask = imageprep::to_grayscale(read_image(options.mask_image));
      mask = resize_bicubic(mask, n, n);
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) out(x, y) = mask.at(x, y) / 255.0;
      break;
    }
    case VarpiPreset::Center: {
      std::vector<double> cell(static_cast<std::size_t>(a) * a);
      const double c = a / 2.0;
      for (int j = 0; j < a; ++j)
        for (int i = 0; i < a; ++i) {
          double d = std::hypot(i + 0.5 - c, j + 0.5 - c);
          cell[std::size_t(j) * a + i] = std::max(0.0, 1.0 - d / c);
        }
      tile(cell);
      break;
    }
    case VarpiPreset::GaussianEdge: {
      auto cell = prob::sampling_prob_grid(a, options.sigma3);
      double peak = *std::max_element(cell.begin(), cell.end());
      for (auto& v : cell) v /= peak;
      tile(cell);
      if (image.width() != n || image.height() != n)
        throw Error(ErrorCode::DimensionMismatch, "edge preset needs the resampled input image");
      auto edges = imageprep::canny_edges(image);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += edges[i];
      break;
    }
  }
  return out;
}

Grid<double> eta_from_priority(const Grid<double>& w) {
  Grid<double> eta(w.width(), w.height());
  for (std::size_t i = 0; i < w.size(); ++i) eta[i] = std::clamp(0.75 + 0.15 * (1.0 - w[i]), 0.0, 1.0);
  return eta;
}

Grid<double> eta_constant(int side, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in [0, 1]");
  return Grid<double>(side, side, eta);
}

namespace {

struct Workspace {
  prob::CanvasLayout layout;
  std::vector<double> ps;
  std::vector<std::uint8_t> y;
  std::vector<double> t, varpi;

  explicit Workspace(const prob::CanvasLayout& l, double sigma3)
      : layout(l), ps(prob::sampling_prob_grid(l.a, sigma3)) {
    std::size_t n = std::size_t(l.a) * l.a;
    y.resize(n);
    t.resize(n);
    varpi.resize(n);
  }

  // Copies module (mx, my) out of the canvas, runs the update, writes it back.
  ModifyResult run(PixelGrid& canvas, const Grid<double>& thresholds, const Grid<double>& varpi_map, int mx, int my,
                   double eta, prob::Tone tone, double sigma2) {
    const int a = layout.a, o = layout.origin_px();
    for (int j = 0; j < a; ++j)
      for (int i = 0; i < a; ++i) {
        std::size_t k = std::size_t(j) * a + i;
        int x = o + mx * a + i, yy = o + my * a + j;
        y[k] = canvas.at(x, yy);
        t[k] = thresholds(x, yy);
        varpi[k] = varpi_map(mx * a + i, my * a + j);
      }
    auto r = modify_module(y, t, ps, varpi, eta, tone, sigma2);
    for (int j = 0; j < a; ++j)
      for (int i = 0; i < a; ++i) canvas.at(o + mx * a + i, o + my * a + j) = y[std::size_t(j) * a + i];
    return r;
  }

  double prob_of(const PixelGrid& canvas, const Grid<double>& thresholds, int mx, int my, prob::Tone tone,
                 double sigma2) const {
    const int a = layout.a, o = layout.origin_px();
    double p = 0;
    for (int j = 0; j < a; ++j)
      for (int i = 0; i < a; ++i) {
        int x = o + mx * a + i, yy = o + my * a + j;
        p += ps[std::size_t(j) * a + i] * prob::threshold_success_prob(canvas.at(x, yy), thresholds(x, yy), tone, sigma2);
      }
    return p;
  }
};

}  // namespace

LuminanceResult estimate_thresholds(const PixelGrid& gray, std::span<const std::uint8_t> light,
                                    std::span<const std::uint8_t> function, const Grid<double>& varpi,
                                    const Grid<double>& eta, const LuminanceConfig& config) {
  if (!gray.is_gray() || gray.width() != gray.height())
    throw Error(ErrorCode::DimensionMismatch, "input must be a square gray image");
  const int side = eta.width();
  if (side <= 0 || eta.height() != side || gray.width() % side != 0 ||
      light.size() != std::size_t(side) * side || function.size() != light.size() ||
      varpi.width() != gray.width() || varpi.height() != gray.height())
    throw Error(ErrorCode::DimensionMismatch, "luminance inputs disagree in size");

  const int a = gray.width() / side;
  const prob::CanvasLayout layout{side, a, config.quiet};
  const int o = layout.origin_px();
  const int window = 3 * a;
  Workspace ws(layout, config.sigma3);

  std::vector<prob::Tone> tones(light.size());
  for (std::size_t k = 0; k < light.size(); ++k) tones[k] = light[k] ? prob::Tone::Light : prob::Tone::Dark;

  LuminanceResult res;
  res.qg = PixelGrid::gray(layout.canvas_px(), layout.canvas_px(), 255);
  res.exhausted = Grid<std::uint8_t>(side, side, 0);
  auto& qg = res.qg;
  std::size_t data_pixels = 0;
  for (int my = 0; my < side; ++my)
    for (int mx = 0; mx < side; ++mx) {
      std::size_t k = std::size_t(my) * side + mx;
      const double extreme = light[k] ? 255.0 : 0.0;
      if (!function[k]) data_pixels += std::size_t(a) * a;
      for (int j = 0; j < a; ++j)
        for (int i = 0; i < a; ++i) {
          double v = function[k] ? extreme : 0.5 * gray.at(mx * a + i, my * a + j) + 0.5 * extreme;
          qg.at(o + mx * a + i, o + my * a + j) = std::uint8_t(std::lround(v));
        }
    }

  Grid<double> old_thresholds;
  for (;;) {
    auto thresholds = prob::expected_threshold(qg, window);
    double delta = 0;
    if (res.iterations > 0) {
      for (std::size_t i = 0; i < thresholds.size(); ++i)
        delta = std::max(delta, std::abs(thresholds[i] - old_thresholds[i]));
      res.log.back().max_delta_threshold = delta;
      if (delta <= config.tolerance) {
        res.converged = true;
        break;
      }
    }
    if (res.iterations >= config.max_iterations) break;
    ++res.iterations;

    PixelGrid next = qg;
    for (int my = 0; my < side; ++my)
      for (int mx = 0; mx < side; ++mx)
        if (!function[std::size_t(my) * side + mx])
          for (int j = 0; j < a; ++j)
            for (int i = 0; i < a; ++i) next.at(o + mx * a + i, o + my * a + j) = gray.at(mx * a + i, my * a + j);

    IterationLog entry;
    entry.iteration = res.iterations;
    double prob_sum = 0;
    int modules = 0;
    for (int my = 0; my < side; ++my)
      for (int mx = 0; mx < side; ++mx) {
        std::size_t k = std::size_t(my) * side + mx;
        if (function[k]) continue;
        auto r = ws.run(next, thresholds, varpi, mx, my, eta[k], tones[k], config.sigma2);
        res.exhausted[k] = r.exhausted ? 1 : 0;
        prob_sum += r.final_prob;
        ++modules;
        if (r.final_prob < eta[k] - 1e-9) ++entry.modules_below_eta;
      }
    std::size_t changed = 0;
    for (std::size_t i = 0; i < qg.bytes().size(); ++i) changed += qg.bytes()[i] != next.bytes()[i];
    entry.changed_fraction = data_pixels ? double(changed) / double(data_pixels) : 0.0;
    entry.mean_module_prob = modules ? prob_sum / modules : 1.0;
    res.log.push_back(entry);

    qg = std::move(next);
    old_thresholds = std::move(thresholds);
  }

  for (int pass = 0; pass < config.settle_passes; ++pass) {
    auto thresholds = prob::expected_threshold(qg, window);
    bool touched = false;
    for (int my = 0; my < side; ++my)
      for (int mx = 0; mx < side; ++mx) {
        std::size_t k = std::size_t(my) * side + mx;
        if (function[k] || res.exhausted[k]) continue;
        if (ws.prob_of(qg, thresholds, mx, my, tones[k], config.sigma2) >= eta[k] - kSlack) continue;
        auto r = ws.run(qg, thresholds, varpi, mx, my, eta[k], tones[k], config.sigma2);
        res.exhausted[k] = r.exhausted ? 1 : 0;
        touched = true;
      }
    if (!touched) break;
    ++res.settle_passes_used;
  }

  res.thresholds = prob::expected_threshold(qg, window);
  res.module_prob = prob::module_probabilities(qg, layout, tones, config.sigma2, config.sigma3);
  return res;
}

}  // namespace artup::lum
