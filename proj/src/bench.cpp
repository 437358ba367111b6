#include "artup/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <opencv2/imgproc.hpp>

#include "cv_view.hpp"

namespace artup::bench {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int worker_count(int jobs, std::size_t work) {
  int n = jobs > 0 ? jobs : int(std::max(1U, std::thread::hardware_concurrency()));
  return int(std::min<std::size_t>(std::size_t(n), std::max<std::size_t>(1, work)));
}

template <typename F>
void parallel_for(std::size_t count, int jobs, F&& body) {
  const int workers = worker_count(jobs, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_lock;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

PixelGrid project(const PixelGrid& image, Kind kind, double degrees) {
  const double w = image.width(), h = image.height();
  const double cw = std::round(1.5 * w), ch = std::round(1.5 * h);
  const double d = 4.0 * w;
  const double th = degrees * std::numbers::pi / 180.0, c = std::cos(th), s = std::sin(th);
  std::vector<cv::Point2f> src, dst;
  for (auto [x, y] : {std::pair{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}}) {
    double px = x - w / 2, py = y - h / 2, pz = 0;
    double rx = px, ry = py, rz = pz;
    switch (kind) {
      case Kind::RotateX: ry = py * c; rz = py * s; break;
      case Kind::RotateY: rx = px * c; rz = -px * s; break;
      default: rx = px * c - py * s; ry = px * s + py * c; break;
    }
    src.emplace_back(float(x), float(y));
    dst.emplace_back(float(d * rx / (d + rz) + cw / 2), float(d * ry / (d + rz) + ch / 2));
  }
  cv::Mat hmat = cv::getPerspectiveTransform(src, dst);
  cv::Mat out;
  const cv::Scalar white = image.channels() == 1 ? cv::Scalar(255) : cv::Scalar(255, 255, 255);
  cv::warpPerspective(detail::as_mat(image), out, hmat, cv::Size(int(cw), int(ch)), cv::INTER_LINEAR,
                      cv::BORDER_CONSTANT, white);
  return detail::copy_mat(out);
}

PixelGrid cover(const PixelGrid& image, int blocks, const SymbolFrame& frame, std::uint64_t seed) {
  PixelGrid out = image;
  const int b = 2 * frame.a;
  const int span = std::max(0, frame.side * frame.a - b);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < blocks; ++i) {
    int x0 = frame.origin + int(rng() % std::uint64_t(span + 1));
    int y0 = frame.origin + int(rng() % std::uint64_t(span + 1));
    std::uint8_t fill = (rng() >> 63) ? 255 : 0;
    for (int y = std::max(0, y0); y < std::min(out.height(), y0 + b); ++y)
      for (int x = std::max(0, x0); x < std::min(out.width(), x0 + b); ++x)
        for (int ch = 0; ch < out.channels(); ++ch) out.at(x, y, ch) = fill;
  }
  return out;
}

std::uint64_t job_seed(std::uint64_t seed, std::size_t item, int rep) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(item), std::uint32_t(rep)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

}  // namespace

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::RotateX: return "rotate_x";
    case Kind::RotateY: return "rotate_y";
    case Kind::RotateZ: return "rotate_z";
    case Kind::Brightness: return "brightness";
    case Kind::Scale: return "scale";
    case Kind::Coverage: return "coverage";
    case Kind::Eta: return "eta";
  }
  return "unknown";
}

Kind parse_kind(std::string_view name) {
  if (name == "x" || name == "rotate_x") return Kind::RotateX;
  if (name == "y" || name == "rotate_y") return Kind::RotateY;
  if (name == "z" || name == "rotate_z") return Kind::RotateZ;
  if (name == "brightness") return Kind::Brightness;
  if (name == "scale") return Kind::Scale;
  if (name == "coverage") return Kind::Coverage;
  if (name == "eta") return Kind::Eta;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep '" + std::string(name) + "'");
}

std::vector<double> default_grid(Kind kind) {
  std::vector<double> g;
  switch (kind) {
    case Kind::RotateX:
    case Kind::RotateY:
      for (int d = -60; d <= 60; d += 15) g.push_back(d);
      break;
    case Kind::RotateZ:
      for (int d = 0; d <= 360; d += 30) g.push_back(d);
      break;
    case Kind::Brightness:
      for (int v = -255; v <= 255; v += 15) g.push_back(v);
      break;
    case Kind::Scale:
      for (int k = 1; k <= 60; ++k) g.push_back(k * 0.05);
      break;
    case Kind::Coverage:
      for (int n = 0; n <= 12; ++n) g.push_back(n);
      break;
    case Kind::Eta:
      for (int k = 100; k >= 0; --k) g.push_back(k / 100.0);
      break;
  }
  return g;
}

PixelGrid perturb(const PixelGrid& image, Kind kind, double parameter, const SymbolFrame& frame,
                  std::uint64_t seed) {
  switch (kind) {
    case Kind::RotateX:
    case Kind::RotateY:
    case Kind::RotateZ:
      return project(image, kind, parameter);
    case Kind::Brightness: {
      PixelGrid out = image;
      const int shift = int(std::lround(parameter));
      for (auto& v : out.bytes()) v = std::uint8_t(std::clamp(int(v) + shift, 0, 255));
      return out;
    }
    case Kind::Scale: {
      int w = std::max(1, int(std::lround(image.width() * parameter)));
      int h = std::max(1, int(std::lround(image.height() * parameter)));
      return resize_bicubic(image, w, h);
    }
    case Kind::Coverage:
      return cover(image, int(std::lround(parameter)), frame, seed);
    case Kind::Eta:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "eta is not an image perturbation");
}

std::vector<Row> run_sweep(const std::vector<BenchItem>& items, const SweepSpec& spec) {
  const int reps = std::max(1, spec.repetitions);
  const std::size_t per_point = items.size() * std::size_t(reps);
  std::vector<Row> rows(spec.points.size() * per_point);
  parallel_for(rows.size(), spec.jobs, [&](std::size_t j) {
    const std::size_t p = j / per_point, item = (j % per_point) / reps;
    const int rep = int(j % std::size_t(reps));
    const auto& it = items[item];
    auto img = perturb(it.image, spec.kind, spec.points[p], it.frame, job_seed(spec.seed, item, rep));
    auto report = scan::scan(img, it.truth ? &*it.truth : nullptr);
    Row& r = rows[j];
    r.kind = spec.kind;
    r.parameter = spec.points[p];
    r.image_id = reps > 1 ? it.id + "#" + std::to_string(rep) : it.id;
    r.outcome = report.outcome;
    r.corrections = report.corrections;
    r.success = report.ok() && report.payload == it.payload;
  });
  return rows;
}

std::vector<RatePoint> aggregate(const std::vector<Row>& rows) {
  std::vector<RatePoint> out;
  std::map<double, std::size_t> index;
  for (const auto& r : rows) {
    auto [pos, inserted] = index.try_emplace(r.parameter, out.size());
    if (inserted) out.push_back({r.parameter, 0, 0});
    auto& p = out[pos->second];
    p.rate += r.success;
    ++p.trials;
  }
  for (auto& p : out) p.rate /= p.trials;
  return out;
}

std::vector<FixturePoint> eta_fixture() {
  return {{Kind::Brightness, -40}, {Kind::Brightness, 40}, {Kind::Scale, 0.75},
          {Kind::Scale, 1.25},     {Kind::RotateX, -30},   {Kind::RotateX, 30}};
}

std::vector<Row> eta_sweep(const std::vector<EtaSource>& images, const BeautifyConfig& base,
                           const std::vector<double>& etas, int jobs) {
  std::vector<BinaryStage> stages(images.size());
  parallel_for(images.size(), jobs, [&](std::size_t i) { stages[i] = binary_stage(images[i].image, base); });

  const auto fixture = eta_fixture();
  const std::size_t per_eta = images.size() * fixture.size();
  std::vector<Row> rows(etas.size() * per_eta);
  parallel_for(etas.size() * images.size(), jobs, [&](std::size_t j) {
    const std::size_t e = j / images.size(), i = j % images.size();
    BeautifyConfig cfg = base;
    cfg.eta_mode = EtaMode::Scalar;
    cfg.eta = etas[e];
    cfg.verify = false;
    auto res = finish(stages[i], cfg);
    const auto& lay = res.binary.layout;
    SymbolFrame frame{lay.origin_px(), lay.side, lay.a};
    for (std::size_t f = 0; f < fixture.size(); ++f) {
      auto img = perturb(res.qc(), fixture[f].kind, fixture[f].parameter, frame);
      auto report = scan::scan(img);
      Row& r = rows[e * per_eta + i * fixture.size() + f];
      r.kind = Kind::Eta;
      r.parameter = etas[e];
      r.image_id = images[i].id + ":" + to_string(fixture[f].kind) + "=" + format_number(fixture[f].parameter);
      r.outcome = report.outcome;
      r.corrections = report.corrections;
      r.success = report.ok() && report.payload == base.payload;
    }
  });
  return rows;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "spearman inputs differ in length");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = (i + j) / 2.0 + 1;
      i = j + 1;
    }
    return r;
  };
  auto rx = ranks(x), ry = ranks(y);
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i] / n, my += ry[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::string to_csv(const std::vector<Row>& rows) {
  std::ostringstream os;
  os << "kind,parameter,image_id,outcome,corrections\n";
  for (const auto& r : rows)
    os << to_string(r.kind) << ',' << format_number(r.parameter) << ',' << r.image_id << ','
       << scan::to_string(r.outcome) << ',' << r.corrections << '\n';
  return os.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<Row>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
  f << to_csv(rows);
}

std::string to_svg(const std::vector<RatePoint>& points, const std::string& title) {
  const double w = 480, h = 300, m = 40;
  double lo = 0, hi = 1;
  if (!points.empty()) {
    auto [a, b] = std::minmax_element(points.begin(), points.end(),
                                      [](const auto& p, const auto& q) { return p.parameter < q.parameter; });
    lo = a->parameter;
    hi = b->parameter > lo ? b->parameter : lo + 1;
  }
  auto sx = [&](double v) { return m + (v - lo) / (hi - lo) * (w - 2 * m); };
  auto sy = [&](double r) { return h - m - r * (h - 2 * m); };
  std::vector<RatePoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& p, const auto& q) { return p.parameter < q.parameter; });
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << m << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n"
     << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << m << "\" y=\"" << h - m + 16 << "\" font-size=\"11\">" << format_number(lo) << "</text>\n"
     << "<text x=\"" << w - m << "\" y=\"" << h - m + 16 << "\" font-size=\"11\" text-anchor=\"end\">"
     << format_number(hi) << "</text>\n"
     << "<text x=\"" << m - 4 << "\" y=\"" << m + 4 << "\" font-size=\"11\" text-anchor=\"end\">1</text>\n"
     << "<text x=\"" << m - 4 << "\" y=\"" << h - m << "\" font-size=\"11\" text-anchor=\"end\">0</text>\n"
     << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (const auto& p : sorted) os << format_number(sx(p.parameter)) << ',' << format_number(sy(p.rate)) << ' ';
  os << "\"/>\n</svg>\n";
  return os.str();
}

BenchItem standard_item(const std::string& id, const qr::Payload& payload, const qr::QrSpec& spec,
                        int module_px) {
  BenchItem it;
  it.id = id;
  it.payload = payload;
  it.truth = qr::encode_symbol(payload, spec);
  it.image = qr::render(*it.truth, module_px);
  it.frame = {qr::kQuietZone * module_px, spec.side(), module_px};
  return it;
}

}  // namespace artup::bench
