#include "artup/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <opencv2/imgproc.hpp>

#include "artup/imageprep.hpp"

namespace artup::scan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMinDynamicRange = 24;

int block_start(int index, int count, int extent) { return index == count - 1 ? extent - kBlock : index * kBlock; }

void check_size(const PixelGrid& gray) {
  if (gray.width() < kMinSide || gray.height() < kMinSide)
    throw Error(ErrorCode::ImageTooSmall, "image must be at least 40x40 pixels");
}

// Per-block black point: the block mean, except that flat blocks take half their minimum, or
// the weighted average of the already computed upper/left neighbors when the block is darker
// than that average.
Grid<int> block_points(const PixelGrid& gray) {
  const int w = gray.width(), h = gray.height();
  const int bw = (w + kBlock - 1) / kBlock, bh = (h + kBlock - 1) / kBlock;
  Grid<int> bp(bw, bh);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      const int x0 = block_start(bx, bw, w), y0 = block_start(by, bh, h);
      int sum = 0, lo = 255, hi = 0;
      for (int y = y0; y < y0 + kBlock; ++y)
        for (int x = x0; x < x0 + kBlock; ++x) {
          int v = gray.at(x, y);
          sum += v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      int point = sum / (kBlock * kBlock);
      if (hi - lo <= kMinDynamicRange) {
        point = lo / 2;
        if (bx > 0 && by > 0) {
          int neighbors = (bp(bx, by - 1) + 2 * bp(bx - 1, by) + bp(bx - 1, by - 1)) / 4;
          if (lo < neighbors) point = neighbors;
        }
      }
      bp(bx, by) = point;
    }
  return bp;
}

}  // namespace

BinaryImage hybrid_binarize(const PixelGrid& input) {
  PixelGrid gray = imageprep::to_grayscale(input);
  check_size(gray);
  const int w = gray.width(), h = gray.height();
  const Grid<int> bp = block_points(gray);
  const int bw = bp.width(), bh = bp.height();

  std::vector<std::int64_t> sat(static_cast<std::size_t>(bw + 1) * (bh + 1), 0);
  auto s = [&](int bx, int by) -> std::int64_t& { return sat[std::size_t(by) * (bw + 1) + bx]; };
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) s(bx + 1, by + 1) = bp(bx, by) + s(bx, by + 1) + s(bx + 1, by) - s(bx, by);

  BinaryImage out(w, h);
  for (int by = 0; by < bh; ++by) {
    const int y0 = block_start(by, bh, h);
    const int ny0 = std::max(0, by - 2), ny1 = std::min(bh, by + 3);
    for (int bx = 0; bx < bw; ++bx) {
      const int x0 = block_start(bx, bw, w);
      const int nx0 = std::max(0, bx - 2), nx1 = std::min(bw, bx + 3);
      const std::int64_t total = s(nx1, ny1) - s(nx0, ny1) - s(nx1, ny0) + s(nx0, ny0);
      const std::int64_t count = std::int64_t(nx1 - nx0) * (ny1 - ny0);
      for (int y = y0; y < y0 + kBlock; ++y)
        for (int x = x0; x < x0 + kBlock; ++x) out(x, y) = count * gray.at(x, y) >= total ? 1 : 0;
    }
  }
  return out;
}

BinaryImage hybrid_binarize_naive(const PixelGrid& input) {
  PixelGrid gray = imageprep::to_grayscale(input);
  check_size(gray);
  const int w = gray.width(), h = gray.height();
  const Grid<int> bp = block_points(gray);
  const int bw = bp.width(), bh = bp.height();
  BinaryImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      // The shifted last block overrides the overlap with its neighbor.
      const int bx = x >= w - kBlock ? bw - 1 : x / kBlock, by = y >= h - kBlock ? bh - 1 : y / kBlock;
      double total = 0;
      int n = 0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
          if (bx + dx >= 0 && bx + dx < bw && by + dy >= 0 && by + dy < bh) {
            total += bp(bx + dx, by + dy);
            ++n;
          }
      out(x, y) = gray.at(x, y) >= total / n ? 1 : 0;
    }
  return out;
}

namespace {

class FinderSearch {
 public:
  explicit FinderSearch(const BinaryImage& img) : img_(img), w_(img.width()), h_(img.height()) {}

  std::vector<FinderPattern> run() {
    for (int i = 0; i < h_; ++i) scan_row(i);
    std::vector<FinderPattern> out;
    for (const auto& c : centers_)
      if (c.count >= 2) out.push_back(c);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
    return out;
  }

 private:
  using Counts = std::array<int, 5>;

  bool dark(int x, int y) const { return img_(x, y) == 0; }

  static bool cross(const Counts& s, double tolerance = 2.0) {
    int total = 0;
    for (int c : s) {
      if (c == 0) return false;
      total += c;
    }
    if (total < 7) return false;
    double ms = total / 7.0, var = ms / tolerance;
    return std::abs(ms - s[0]) < var && std::abs(ms - s[1]) < var && std::abs(3 * ms - s[2]) < 3 * var &&
           std::abs(ms - s[3]) < var && std::abs(ms - s[4]) < var;
  }

  static double center_from_end(const Counts& s, int end) { return (end - s[4] - s[3]) - s[2] / 2.0; }

  void scan_row(int i) {
    Counts s{};
    int state = 0;
    for (int j = 0; j < w_; ++j) {
      if (dark(j, i)) {
        if (state & 1) ++state;
        ++s[std::size_t(state)];
      } else if (!(state & 1)) {
        if (state == 4) {
          if (cross(s) && possible_center(s, i, j)) {
            s = {};
            state = 0;
          } else {
            s = {s[2], s[3], s[4], 1, 0};
            state = 3;
          }
        } else {
          ++s[std::size_t(++state)];
        }
      } else {
        ++s[std::size_t(state)];
      }
    }
    if (cross(s)) possible_center(s, i, w_);
  }

  double check_vertical(int start, int cj, int max_count, int original) const {
    Counts s{};
    int i = start;
    while (i >= 0 && dark(cj, i)) ++s[2], --i;
    if (i < 0) return kNaN;
    while (i >= 0 && !dark(cj, i) && s[1] <= max_count) ++s[1], --i;
    if (i < 0 || s[1] > max_count) return kNaN;
    while (i >= 0 && dark(cj, i) && s[0] <= max_count) ++s[0], --i;
    if (s[0] > max_count) return kNaN;
    i = start + 1;
    while (i < h_ && dark(cj, i)) ++s[2], ++i;
    if (i == h_) return kNaN;
    while (i < h_ && !dark(cj, i) && s[3] < max_count) ++s[3], ++i;
    if (i == h_ || s[3] >= max_count) return kNaN;
    while (i < h_ && dark(cj, i) && s[4] < max_count) ++s[4], ++i;
    if (s[4] >= max_count) return kNaN;
    int total = s[0] + s[1] + s[2] + s[3] + s[4];
    if (5 * std::abs(total - original) >= 2 * original) return kNaN;
    return cross(s) ? center_from_end(s, i) : kNaN;
  }

  double check_horizontal(int start, int ci, int max_count, int original) const {
    Counts s{};
    int j = start;
    while (j >= 0 && dark(j, ci)) ++s[2], --j;
    if (j < 0) return kNaN;
    while (j >= 0 && !dark(j, ci) && s[1] <= max_count) ++s[1], --j;
    if (j < 0 || s[1] > max_count) return kNaN;
    while (j >= 0 && dark(j, ci) && s[0] <= max_count) ++s[0], --j;
    if (s[0] > max_count) return kNaN;
    j = start + 1;
    while (j < w_ && dark(j, ci)) ++s[2], ++j;
    if (j == w_) return kNaN;
    while (j < w_ && !dark(j, ci) && s[3] < max_count) ++s[3], ++j;
    if (j == w_ || s[3] >= max_count) return kNaN;
    while (j < w_ && dark(j, ci) && s[4] < max_count) ++s[4], ++j;
    if (s[4] >= max_count) return kNaN;
    int total = s[0] + s[1] + s[2] + s[3] + s[4];
    if (5 * std::abs(total - original) >= original) return kNaN;
    return cross(s) ? center_from_end(s, j) : kNaN;
  }

  bool check_diagonal(int ci, int cj) const {
    Counts s{};
    int i = 0;
    auto up = [&](int k) { return ci >= k && cj >= k; };
    while (up(i) && dark(cj - i, ci - i)) ++s[2], ++i;
    if (s[2] == 0) return false;
    while (up(i) && !dark(cj - i, ci - i)) ++s[1], ++i;
    if (s[1] == 0) return false;
    while (up(i) && dark(cj - i, ci - i)) ++s[0], ++i;
    if (s[0] == 0) return false;
    auto down = [&](int k) { return ci + k < h_ && cj + k < w_; };
    i = 1;
    while (down(i) && dark(cj + i, ci + i)) ++s[2], ++i;
    while (down(i) && !dark(cj + i, ci + i)) ++s[3], ++i;
    if (s[3] == 0) return false;
    while (down(i) && dark(cj + i, ci + i)) ++s[4], ++i;
    if (s[4] == 0) return false;
    return cross(s, 1.333);
  }

  bool possible_center(const Counts& s, int i, int j) {
    int total = s[0] + s[1] + s[2] + s[3] + s[4];
    double cj = center_from_end(s, j);
    double ci = check_vertical(i, int(cj), s[2], total);
    if (std::isnan(ci)) return false;
    cj = check_horizontal(int(cj), int(ci), s[2], total);
    if (std::isnan(cj) || !check_diagonal(int(ci), int(cj))) return false;
    double ms = total / 7.0;
    for (auto& c : centers_) {
      if (std::abs(ci - c.center.y) <= ms && std::abs(cj - c.center.x) <= ms) {
        double diff = std::abs(ms - c.module_size);
        if (diff <= 1.0 || diff <= c.module_size) {
          double n = c.count + 1.0;
          c.center.x = (c.count * c.center.x + cj) / n;
          c.center.y = (c.count * c.center.y + ci) / n;
          c.module_size = (c.count * c.module_size + ms) / n;
          ++c.count;
          return true;
        }
      }
    }
    centers_.push_back({{cj, ci}, ms, 1});
    return true;
  }

  const BinaryImage& img_;
  int w_, h_;
  std::vector<FinderPattern> centers_;
};

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double cross_z(Point a, Point b, Point c) { return (c.x - b.x) * (a.y - b.y) - (c.y - b.y) * (a.x - b.x); }

std::optional<FinderTriple> order_triple(const FinderPattern& p0, const FinderPattern& p1, const FinderPattern& p2) {
  double d01 = dist(p0.center, p1.center), d12 = dist(p1.center, p2.center), d02 = dist(p0.center, p2.center);
  const FinderPattern *a, *b, *c;  // b = corner opposite the longest side
  if (d12 >= d01 && d12 >= d02) b = &p0, a = &p1, c = &p2;
  else if (d02 >= d12 && d02 >= d01) b = &p1, a = &p0, c = &p2;
  else b = &p2, a = &p0, c = &p1;
  if (cross_z(a->center, b->center, c->center) < 0) std::swap(a, c);

  Point u{c->center.x - b->center.x, c->center.y - b->center.y};
  Point v{a->center.x - b->center.x, a->center.y - b->center.y};
  double lu = std::hypot(u.x, u.y), lv = std::hypot(v.x, v.y);
  if (lu <= 0 || lv <= 0) return std::nullopt;
  double cosine = (u.x * v.x + u.y * v.y) / (lu * lv);
  if (std::abs(cosine) > 0.5 || std::max(lu, lv) > 2 * std::min(lu, lv)) return std::nullopt;
  double ms = (a->module_size + b->module_size + c->module_size) / 3;
  if (lu < 7 * ms || lv < 7 * ms) return std::nullopt;
  return FinderTriple{*b, *c, *a};
}

// Length of the dark-light-dark run starting at `from` toward `to` (Bresenham walk).
double run_length(const BinaryImage& img, int from_x, int from_y, int to_x, int to_y) {
  bool steep = std::abs(to_y - from_y) > std::abs(to_x - from_x);
  if (steep) {
    std::swap(from_x, from_y);
    std::swap(to_x, to_y);
  }
  int dx = std::abs(to_x - from_x), dy = std::abs(to_y - from_y);
  int error = -dx / 2;
  int xstep = from_x < to_x ? 1 : -1, ystep = from_y < to_y ? 1 : -1;
  int state = 0;
  int x_limit = to_x + xstep;
  for (int x = from_x, y = from_y; x != x_limit; x += xstep) {
    int rx = steep ? y : x, ry = steep ? x : y;
    bool is_dark = img(rx, ry) == 0;
    if ((state == 1) == is_dark) {
      if (state == 2) return std::hypot(x - from_x, y - from_y);
      ++state;
    }
    error += dy;
    if (error > 0) {
      if (y == to_y) break;
      y += ystep;
      error -= dx;
    }
  }
  if (state == 2) return std::hypot(to_x + xstep - from_x, to_y - from_y);
  return kNaN;
}

double run_length_both(const BinaryImage& img, int from_x, int from_y, int to_x, int to_y) {
  const int w = img.width(), h = img.height();
  double result = run_length(img, from_x, from_y, to_x, to_y);
  double scale = 1.0;
  int other_x = from_x - (to_x - from_x);
  if (other_x < 0) {
    scale = double(from_x) / (from_x - other_x);
    other_x = 0;
  } else if (other_x >= w) {
    scale = double(w - 1 - from_x) / (other_x - from_x);
    other_x = w - 1;
  }
  int other_y = int(from_y - (to_y - from_y) * scale);
  scale = 1.0;
  if (other_y < 0) {
    scale = double(from_y) / (from_y - other_y);
    other_y = 0;
  } else if (other_y >= h) {
    scale = double(h - 1 - from_y) / (other_y - from_y);
    other_y = h - 1;
  }
  other_x = int(from_x + (other_x - from_x) * scale);
  result += run_length(img, from_x, from_y, other_x, other_y);
  return result - 1.0;
}

double module_size_one_way(const BinaryImage& img, Point p, Point q) {
  double a = run_length_both(img, int(p.x), int(p.y), int(q.x), int(q.y));
  double b = run_length_both(img, int(q.x), int(q.y), int(p.x), int(p.y));
  if (std::isnan(a)) return b / 7.0;
  if (std::isnan(b)) return a / 7.0;
  return (a + b) / 14.0;
}

class AlignmentSearch {
 public:
  AlignmentSearch(const BinaryImage& img, int x0, int y0, int width, int height, double ms)
      : img_(img), x0_(x0), y0_(y0), w_(width), h_(height), ms_(ms) {}

  std::optional<Point> run() {
    const int max_j = x0_ + w_, mid = y0_ + h_ / 2;
    for (int g = 0; g < h_; ++g) {
      int i = mid + ((g & 1) == 0 ? (g + 1) / 2 : -((g + 1) / 2));
      if (i < 0 || i >= img_.height()) continue;
      std::array<int, 3> s{};
      int j = x0_;
      while (j < max_j && !dark(j, i)) ++j;
      int state = 0;
      while (j < max_j) {
        if (dark(j, i)) {
          if (state == 1) {
            ++s[1];
          } else if (state == 2) {
            if (cross(s))
              if (auto hit = possible_center(s, i, j)) return hit;
            s = {s[2], 1, 0};
            state = 1;
          } else {
            ++s[std::size_t(++state)];
          }
        } else {
          if (state == 1) ++state;
          ++s[std::size_t(state)];
        }
        ++j;
      }
      if (cross(s))
        if (auto hit = possible_center(s, i, max_j)) return hit;
    }
    if (!found_.empty()) return found_.front();
    return std::nullopt;
  }

 private:
  bool dark(int x, int y) const { return img_(x, y) == 0; }

  bool cross(const std::array<int, 3>& s) const {
    double var = ms_ / 2.0;
    for (int c : s)
      if (std::abs(ms_ - c) >= var) return false;
    return true;
  }

  static double center_from_end(const std::array<int, 3>& s, int end) { return (end - s[2]) - s[1] / 2.0; }

  double check_vertical(int start, int cj, int max_count, int original) const {
    const int h = img_.height();
    std::array<int, 3> s{};
    int i = start;
    while (i >= 0 && dark(cj, i) && s[1] <= max_count) ++s[1], --i;
    if (i < 0 || s[1] > max_count) return kNaN;
    while (i >= 0 && !dark(cj, i) && s[0] <= max_count) ++s[0], --i;
    if (s[0] > max_count) return kNaN;
    i = start + 1;
    while (i < h && dark(cj, i) && s[1] <= max_count) ++s[1], ++i;
    if (i == h || s[1] > max_count) return kNaN;
    while (i < h && !dark(cj, i) && s[2] <= max_count) ++s[2], ++i;
    if (s[2] > max_count) return kNaN;
    int total = s[0] + s[1] + s[2];
    if (5 * std::abs(total - original) >= 2 * original) return kNaN;
    return cross(s) ? center_from_end(s, i) : kNaN;
  }

  std::optional<Point> possible_center(const std::array<int, 3>& s, int i, int j) {
    int total = s[0] + s[1] + s[2];
    double cj = center_from_end(s, j);
    double ci = check_vertical(i, int(cj), 2 * s[1], total);
    if (std::isnan(ci)) return std::nullopt;
    double ms = total / 3.0;
    for (const auto& p : found_)
      if (std::abs(ci - p.y) <= ms && std::abs(cj - p.x) <= ms) return Point{(p.x + cj) / 2, (p.y + ci) / 2};
    found_.push_back({cj, ci});
    return std::nullopt;
  }

  const BinaryImage& img_;
  int x0_, y0_, w_, h_;
  double ms_;
  std::vector<Point> found_;
};

}  // namespace

std::vector<FinderPattern> find_finder_candidates(const BinaryImage& binary) { return FinderSearch(binary).run(); }

std::vector<FinderTriple> detect_finders(const BinaryImage& binary, int max_triples) {
  auto cands = find_finder_candidates(binary);
  if (cands.size() > 12) cands.resize(12);
  struct Scored {
    FinderTriple t;
    double score;
  };
  std::vector<Scored> scored;
  for (std::size_t i = 0; i < cands.size(); ++i)
    for (std::size_t j = i + 1; j < cands.size(); ++j)
      for (std::size_t k = j + 1; k < cands.size(); ++k) {
        auto t = order_triple(cands[i], cands[j], cands[k]);
        if (!t) continue;
        double m[3] = {cands[i].module_size, cands[j].module_size, cands[k].module_size};
        double mean = (m[0] + m[1] + m[2]) / 3;
        double var = 0;
        for (double x : m) var += (x - mean) * (x - mean);
        scored.push_back({*t, var / (mean * mean)});
      }
  if (scored.empty()) throw Error(ErrorCode::DetectFailed, "no consistent finder-pattern triple");
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  std::vector<FinderTriple> out;
  for (std::size_t i = 0; i < scored.size() && int(i) < max_triples; ++i) out.push_back(scored[i].t);
  return out;
}

double estimate_module_size(const BinaryImage& binary, const FinderTriple& t) {
  double a = module_size_one_way(binary, t.top_left.center, t.top_right.center);
  double b = module_size_one_way(binary, t.top_left.center, t.bottom_left.center);
  if (std::isnan(a) && std::isnan(b))
    return (t.top_left.module_size + t.top_right.module_size + t.bottom_left.module_size) / 3;
  if (std::isnan(a)) return b;
  if (std::isnan(b)) return a;
  return (a + b) / 2;
}

int estimate_dimension(const FinderTriple& t, double module_size) {
  if (!(module_size > 0)) throw Error(ErrorCode::VersionEstimateFailed, "module size unknown");
  int tltr = int(std::lround(dist(t.top_left.center, t.top_right.center) / module_size));
  int tlbl = int(std::lround(dist(t.top_left.center, t.bottom_left.center) / module_size));
  int dim = (tltr + tlbl) / 2 + 7;
  switch (dim & 3) {
    case 0: ++dim; break;
    case 2: --dim; break;
    case 3: throw Error(ErrorCode::VersionEstimateFailed, "finder spacing gives an impossible side");
  }
  if (dim < 21 || dim > 4 * qr::kMaxVersion + 17)
    throw Error(ErrorCode::VersionEstimateFailed, "estimated side " + std::to_string(dim) + " is unsupported");
  return dim;
}

std::optional<Point> find_alignment(const BinaryImage& binary, const FinderTriple& t, int dimension,
                                    double module_size) {
  if (dimension <= 21) return std::nullopt;
  const Point tl = t.top_left.center, tr = t.top_right.center, bl = t.bottom_left.center;
  double br_x = tr.x - tl.x + bl.x, br_y = tr.y - tl.y + bl.y;
  double correction = 1.0 - 3.0 / (dimension - 7);
  int est_x = int(tl.x + correction * (br_x - tl.x));
  int est_y = int(tl.y + correction * (br_y - tl.y));
  for (int factor : {4, 8, 16}) {
    int allowance = int(factor * module_size);
    int left = std::max(0, est_x - allowance), right = std::min(binary.width() - 1, est_x + allowance);
    int top = std::max(0, est_y - allowance), bottom = std::min(binary.height() - 1, est_y + allowance);
    if (right - left < module_size * 3 || bottom - top < module_size * 3) continue;
    AlignmentSearch search(binary, left, top, right - left, bottom - top, module_size);
    if (auto p = search.run()) return p;
  }
  return std::nullopt;
}

qr::ModuleMatrix sample_grid(const BinaryImage& binary, const FinderTriple& t, int dimension,
                             const std::optional<Point>& alignment) {
  const double far = dimension - 3.5;
  std::vector<cv::Point2f> src{{3.5f, 3.5f}, {float(far), 3.5f}, {3.5f, float(far)}};
  std::vector<cv::Point2f> dst{{float(t.top_left.center.x), float(t.top_left.center.y)},
                               {float(t.top_right.center.x), float(t.top_right.center.y)},
                               {float(t.bottom_left.center.x), float(t.bottom_left.center.y)}};
  if (alignment) {
    src.push_back({float(far - 3.0), float(far - 3.0)});
    dst.push_back({float(alignment->x), float(alignment->y)});
  } else {
    src.push_back({float(far), float(far)});
    dst.push_back({float(t.top_right.center.x - t.top_left.center.x + t.bottom_left.center.x),
                   float(t.top_right.center.y - t.top_left.center.y + t.bottom_left.center.y)});
  }
  cv::Mat hmat = cv::getPerspectiveTransform(src, dst);
  if (hmat.empty()) throw Error(ErrorCode::DetectFailed, "degenerate perspective");

  std::vector<cv::Point2d> centers, mapped;
  centers.reserve(std::size_t(dimension) * dimension);
  for (int y = 0; y < dimension; ++y)
    for (int x = 0; x < dimension; ++x) centers.push_back({x + 0.5, y + 0.5});
  cv::perspectiveTransform(centers, mapped, hmat);

  qr::ModuleMatrix m(dimension);
  const int w = binary.width(), h = binary.height();
  for (int y = 0; y < dimension; ++y)
    for (int x = 0; x < dimension; ++x) {
      const auto& p = mapped[std::size_t(y) * dimension + x];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::DetectFailed, "sample point at infinity");
      int px = int(std::floor(p.x)), py = int(std::floor(p.y));
      if (px < -1 || py < -1 || px > w || py > h) throw Error(ErrorCode::DetectFailed, "sample point off image");
      px = std::clamp(px, 0, w - 1);
      py = std::clamp(py, 0, h - 1);
      m.set_dark(x, y, binary(px, py) == 0);
    }
  return m;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Decoded: return "decoded";
    case Outcome::DetectFailed: return "detect_failed";
    case Outcome::DecodeFailed: return "decode_failed";
  }
  return "unknown";
}

int ScanReport::error_count() const {
  if (!error_mask) return 0;
  int n = 0;
  for (auto v : error_mask->values()) n += v;
  return n;
}

namespace {

void attach(ScanReport& r, qr::ModuleMatrix sampled, const qr::ModuleMatrix* truth) {
  if (truth && truth->side() == sampled.side()) {
    Grid<std::uint8_t> mask(sampled.side(), sampled.side());
    for (int y = 0; y < sampled.side(); ++y)
      for (int x = 0; x < sampled.side(); ++x) mask(x, y) = sampled.dark(x, y) != truth->dark(x, y);
    r.error_mask = std::move(mask);
  } else {
    r.error_mask.reset();
  }
  r.sampled = std::move(sampled);
}

}  // namespace

ScanReport scan(const PixelGrid& image, const qr::ModuleMatrix* ground_truth, const ScanOptions& options) {
  ScanReport report;
  BinaryImage binary;
  std::vector<FinderTriple> triples;
  try {
    binary = hybrid_binarize(image);
    triples = detect_finders(binary, options.max_triples);
  } catch (const Error& e) {
    report.outcome = Outcome::DetectFailed;
    report.message = e.what();
    return report;
  }

  bool sampled_any = false;
  std::string last = "no usable finder triple";
  for (const auto& t : triples) {
    int dim;
    double ms;
    try {
      ms = estimate_module_size(binary, t);
      dim = estimate_dimension(t, ms);
    } catch (const Error& e) {
      last = e.what();
      continue;
    }
    auto align = find_alignment(binary, t, dim, ms);
    std::vector<std::optional<Point>> corners{align};
    if (align) corners.push_back(std::nullopt);
    for (const auto& corner : corners) {
      qr::ModuleMatrix grid;
      try {
        grid = sample_grid(binary, t, dim, corner);
      } catch (const Error& e) {
        last = e.what();
        continue;
      }
      if (!sampled_any) attach(report, grid, ground_truth);
      sampled_any = true;
      try {
        auto decoded = qr::decode_matrix(grid);
        report.outcome = Outcome::Decoded;
        report.payload = std::move(decoded.payload);
        report.corrections = decoded.corrections;
        report.spec = decoded.spec;
        report.message.clear();
        attach(report, std::move(grid), ground_truth);
        return report;
      } catch (const Error& e) {
        last = e.what();
      }
    }
  }
  report.outcome = sampled_any ? Outcome::DecodeFailed : Outcome::DetectFailed;
  report.message = last;
  return report;
}

PixelGrid error_overlay(const ScanReport& report, int module_px) {
  if (!report.sampled) return PixelGrid::rgb(1, 1, 255);
  const auto& m = *report.sampled;
  const int n = m.side() * module_px;
  PixelGrid out = PixelGrid::rgb(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      int mx = x / module_px, my = y / module_px;
      bool dark = m.dark(mx, my);
      Rgb c = dark ? Rgb{40, 40, 40} : Rgb{235, 235, 235};
      if (report.error_mask) {
        bool wrong = (*report.error_mask)(mx, my) != 0;
        c = wrong ? (dark ? Rgb{150, 0, 0} : Rgb{255, 90, 90}) : (dark ? Rgb{0, 110, 0} : Rgb{120, 230, 120});
      }
      out.set_rgb(x, y, c);
    }
  return out;
}

}  // namespace artup::scan
