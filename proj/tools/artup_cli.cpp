#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "artup/bench.hpp"
#include "artup/pipeline.hpp"

using namespace artup;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kUsage = 1, kDomain = 2;

struct Common {
  std::string data;
  int version = 0;
  std::string ec = "M";
  int mask = 0;
  bool json = false;
};

struct BeautifyArgs {
  std::string image;
  std::string eta = "0.9";
  std::string omega = "gaussian";
  double sigma2 = prob::kDefaultSigma2;
  double sigma3 = 0;
  int size = 512;
  std::uint64_t seed = 0;
  bool verify = false;
  std::string out;
  std::string diag_dir;
};

struct BenchArgs {
  std::string sweep;
  std::string images;
  std::string csv;
  std::string svg;
  int jobs = 0;
  int repetitions = 30;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Io:
      return kUsage;
    default:
      return kDomain;
  }
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--data", c.data, "Payload text");
  cmd->add_option("--version", c.version, "Symbol version 1-10 (0 = smallest that fits)")->check(CLI::Range(0, 10));
  cmd->add_option("--ec", c.ec, "Error correction level")->check(CLI::IsMember({"L", "M", "Q", "H"}));
  cmd->add_option("--mask", c.mask, "Data mask 0-7")->check(CLI::Range(0, 7));
  cmd->add_flag("--json", c.json, "Print a JSON report on stdout");
}

void add_beautify(CLI::App* cmd, BeautifyArgs& b) {
  cmd->add_option("--eta", b.eta, "Minimum module probability, or 'map' for the priority-derived map");
  cmd->add_option("--omega-preset", b.omega,
                  "Weight preset: gaussian, constant, random, image:<path>, center, edge");
  cmd->add_option("--sigma2", b.sigma2, "Threshold noise std-dev in gray levels");
  cmd->add_option("--sigma3", b.sigma3, "Sampling std-dev in pixels (0 = a/6)");
  cmd->add_option("--size", b.size, "Output canvas side in pixels")->check(CLI::Range(64, 8192));
  cmd->add_option("--seed", b.seed, "Seed for the random preset");
}

BeautifyConfig make_config(const Common& c, const BeautifyArgs& b) {
  BeautifyConfig cfg;
  cfg.payload = qr::Payload::from_string(c.data);
  cfg.version = c.version;
  cfg.ec = qr::parse_ec_level(c.ec);
  cfg.mask = c.mask;
  if (b.eta == "map") {
    cfg.eta_mode = EtaMode::Map;
  } else {
    try {
      std::size_t used = 0;
      cfg.eta = std::stod(b.eta, &used);
      if (used != b.eta.size()) throw std::invalid_argument(b.eta);
    } catch (const std::exception&) {
      throw UsageError("--eta expects a number in [0, 1] or 'map'");
    }
  }
  std::string preset = b.omega;
  if (preset.rfind("image:", 0) == 0) {
    cfg.varpi.mask_image = preset.substr(6);
    preset = "image";
  }
  cfg.varpi.preset = lum::parse_varpi_preset(preset);
  if (cfg.varpi.preset == lum::VarpiPreset::Image && cfg.varpi.mask_image.empty())
    throw UsageError("--omega-preset image needs a path: image:<path>");
  cfg.varpi.seed = b.seed;
  cfg.sigma2 = b.sigma2;
  cfg.sigma3 = b.sigma3;
  cfg.size = b.size;
  cfg.verify = b.verify;
  cfg.validate();
  return cfg;
}

json report_json(const scan::ScanReport& r) {
  json j{{"outcome", scan::to_string(r.outcome)}, {"corrections", r.corrections}};
  if (r.ok()) {
    j["payload"] = r.payload.text();
    j["version"] = r.spec->version;
    j["ec"] = std::string(1, qr::to_char(r.spec->ec));
    j["mask"] = r.spec->mask;
  }
  if (r.error_mask) j["module_errors"] = r.error_count();
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

json diagnostics_json(const BeautifyResult& r) {
  const auto& st = r.binary;
  const auto& lum = r.luminance;
  int below = 0, exhausted = 0, data = 0;
  for (std::size_t k = 0; k < st.function.size(); ++k) {
    if (st.function[k]) continue;
    ++data;
    if (lum.exhausted[k]) ++exhausted;
    else if (lum.module_prob[k] < r.eta[k] - 1e-9) ++below;
  }
  json log = json::array();
  for (const auto& it : lum.log)
    log.push_back({{"iteration", it.iteration},
                   {"changed_fraction", it.changed_fraction},
                   {"max_delta_threshold", it.max_delta_threshold},
                   {"mean_module_prob", it.mean_module_prob},
                   {"modules_below_eta", it.modules_below_eta}});
  return {{"version", st.spec.version},
          {"ec", std::string(1, qr::to_char(st.spec.ec))},
          {"mask", st.spec.mask},
          {"side", st.layout.side},
          {"module_px", st.layout.a},
          {"canvas_px", st.layout.canvas_px()},
          {"controllable_modules", st.controllable},
          {"modules_matching_image", st.matched_modules},
          {"data_modules", data},
          {"modules_below_eta", below},
          {"modules_exhausted", exhausted},
          {"iterations", lum.iterations},
          {"converged", lum.converged},
          {"settle_passes", lum.settle_passes_used},
          {"pixels_clamped_low", r.color.clamped_low},
          {"pixels_clamped_high", r.color.clamped_high},
          {"iteration_log", log}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
  f << text;
}

int run_encode(const Common& c, const std::string& out, int module_px) {
  if (c.data.empty()) throw UsageError("--data is required");
  if (out.empty()) throw UsageError("--out is required");
  auto payload = qr::Payload::from_string(c.data);
  auto ec = qr::parse_ec_level(c.ec);
  int version = c.version;
  if (version == 0) {
    auto v = qr::min_version(int(payload.bytes.size()), ec);
    if (!v) throw Error(ErrorCode::CapacityExceeded, "payload does not fit any supported version");
    version = *v;
  }
  auto m = qr::encode_symbol(payload, {version, ec, c.mask});
  int px = module_px > 0 ? module_px : qr::default_module_px(m.side());
  write_png(out, qr::render(m, px));
  if (c.json)
    std::cout << json{{"version", version}, {"ec", c.ec}, {"mask", c.mask}, {"side", m.side()}, {"module_px", px}, {"out", out}}.dump()
              << '\n';
  return kOk;
}

int run_beautify(const Common& c, const BeautifyArgs& b) {
  if (c.data.empty()) throw UsageError("--data is required");
  if (b.image.empty()) throw UsageError("--image is required");
  if (b.out.empty() && b.diag_dir.empty()) throw UsageError("--out or --diag-dir is required");
  auto cfg = make_config(c, b);
  auto img = read_image(b.image);
  BeautifyResult r;
  try {
    r = beautify(img, cfg);
  } catch (const VerificationError& e) {
    if (c.json) std::cout << json{{"error", e.what()}, {"scan", report_json(e.report())}}.dump() << '\n';
    throw;
  }
  if (!b.out.empty()) write_png(b.out, r.qc());
  json diag = diagnostics_json(r);
  if (r.verification) diag["scan"] = report_json(*r.verification);
  if (!b.diag_dir.empty()) {
    fs::create_directories(b.diag_dir);
    const fs::path d = b.diag_dir;
    write_png(d / "qb.png", r.qb_image);
    write_png(d / "qg.png", r.qg());
    write_png(d / "qc.png", r.qc());
    write_png(d / "priority.png", heat_map(r.binary.priority.w, r.binary.layout.a));
    write_png(d / "module_prob.png", heat_map(r.luminance.module_prob, r.binary.layout.a, 0.5, 1.0));
    write_text(d / "diagnostics.json", diag.dump(2) + "\n");
  }
  if (c.json) std::cout << diag.dump() << '\n';
  return kOk;
}

int run_scan(const std::string& path, const std::string& truth, const std::string& overlay, bool as_json) {
  auto img = read_image(path);
  std::optional<qr::ModuleMatrix> gt;
  if (!truth.empty()) {
    std::ifstream f(truth);
    if (!f) throw Error(ErrorCode::Io, "cannot read " + truth);
    gt = qr::from_pbm(std::string(std::istreambuf_iterator<char>(f), {}));
  }
  auto r = scan::scan(img, gt ? &*gt : nullptr);
  if (!overlay.empty() && r.sampled) write_png(overlay, scan::error_overlay(r));
  if (as_json) std::cout << report_json(r).dump() << '\n';
  else if (r.ok()) std::cout << r.payload.text() << '\n';
  else std::cerr << "artup: " << scan::to_string(r.outcome) << ": " << r.message << '\n';
  return r.ok() ? kOk : kDomain;
}

std::vector<fs::path> image_files(const std::string& dir) {
  if (dir.empty()) throw UsageError("--images is required");
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
    if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp"))
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::Io, "no images in " + dir);
  return files;
}

int run_bench(Common c, const BeautifyArgs& b, const BenchArgs& a) {
  if (c.data.empty()) c.data = "https://example.org/artup";
  if (a.csv.empty()) throw UsageError("--csv is required");
  const auto kind = bench::parse_kind(a.sweep);
  auto cfg = make_config(c, b);
  cfg.verify = false;
  const auto files = image_files(a.images);

  std::vector<bench::Row> rows;
  if (kind == bench::Kind::Eta) {
    std::vector<bench::EtaSource> src;
    for (const auto& f : files) src.push_back({f.stem().string(), read_image(f)});
    rows = bench::eta_sweep(src, cfg, bench::default_grid(kind), a.jobs);
  } else {
    std::vector<bench::BenchItem> items;
    for (const auto& f : files) {
      auto r = beautify(read_image(f), cfg);
      const auto& lay = r.binary.layout;
      items.push_back({f.stem().string(), r.qc(), cfg.payload, {lay.origin_px(), lay.side, lay.a}, r.binary.qb});
    }
    bench::SweepSpec spec{kind, bench::default_grid(kind), b.seed,
                          kind == bench::Kind::Coverage ? a.repetitions : 1, a.jobs};
    rows = bench::run_sweep(items, spec);
  }
  bench::write_csv(a.csv, rows);
  auto agg = bench::aggregate(rows);
  if (!a.svg.empty()) write_text(a.svg, bench::to_svg(agg, std::string(bench::to_string(kind)) + " success rate"));
  if (c.json) {
    json pts = json::array();
    for (const auto& p : agg) pts.push_back({{"parameter", p.parameter}, {"rate", p.rate}, {"trials", p.trials}});
    std::cout << json{{"sweep", bench::to_string(kind)}, {"rows", rows.size()}, {"points", pts}}.dump() << '\n';
  } else {
    for (const auto& p : agg) std::cout << p.parameter << '\t' << p.rate << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scanning-robust aesthetic QR codes"};
  app.set_config("--config", "", "Read options from a key=value file (flags override it)");
  app.require_subcommand(1);

  Common common;
  BeautifyArgs beauty;
  BenchArgs bench_args;
  std::string out, scan_path, truth, overlay;
  int module_px = 0;

  auto* encode = app.add_subcommand("encode", "Render a standard QR code");
  add_common(encode, common);
  encode->add_option("--out", out, "Output PNG");
  encode->add_option("--module-px", module_px, "Pixels per module (default fits 512 px)");

  auto* beautify_cmd = app.add_subcommand("beautify", "Blend a QR code into an image");
  add_common(beautify_cmd, common);
  add_beautify(beautify_cmd, beauty);
  beautify_cmd->add_option("--image", beauty.image, "Input image");
  beautify_cmd->add_flag("--verify", beauty.verify, "Scan the result and fail if it does not decode");
  beautify_cmd->add_option("--out", beauty.out, "Output PNG");
  beautify_cmd->add_option("--diag-dir", beauty.diag_dir, "Write stage images and diagnostics.json here");

  auto* scan_cmd = app.add_subcommand("scan", "Decode a QR code image");
  scan_cmd->add_option("image", scan_path, "Image file")->required();
  scan_cmd->add_option("--truth", truth, "Expected module matrix (PBM) for the error mask");
  scan_cmd->add_option("--overlay", overlay, "Write the red/green error overlay PNG");
  scan_cmd->add_flag("--json", common.json, "Print a JSON report on stdout");

  auto add_bench = [&](CLI::App* cmd, bool fixed_sweep) {
    add_common(cmd, common);
    add_beautify(cmd, beauty);
    if (!fixed_sweep)
      cmd->add_option("--sweep", bench_args.sweep, "x, y, z, brightness, scale, coverage or eta")->required();
    cmd->add_option("--images", bench_args.images, "Directory of input images");
    cmd->add_option("--csv", bench_args.csv, "Output CSV");
    cmd->add_option("--svg", bench_args.svg, "Output SVG plot");
    cmd->add_option("--jobs", bench_args.jobs, "Worker threads (default: logical cores)");
    cmd->add_option("--repetitions", bench_args.repetitions, "Coverage repetitions")->check(CLI::Range(1, 1000));
  };
  auto* bench_cmd = app.add_subcommand("bench", "Perturbation sweep over beautified codes");
  add_bench(bench_cmd, false);
  auto* eta_cmd = app.add_subcommand("eta-sweep", "Success rate against eta under the mild fixture");
  add_bench(eta_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*encode) return run_encode(common, out, module_px);
    if (*beautify_cmd) return run_beautify(common, beauty);
    if (*scan_cmd) return run_scan(scan_path, truth, overlay, common.json);
    if (*bench_cmd) return run_bench(common, beauty, bench_args);
    if (*eta_cmd) {
      bench_args.sweep = "eta";
      return run_bench(common, beauty, bench_args);
    }
  } catch (const UsageError& e) {
    std::cerr << "artup: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "artup: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "artup: " << e.what() << '\n';
    return kDomain;
  }
  return kUsage;
}
