#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstring>

#include "artup/bench.hpp"
#include "artup/pipeline.hpp"

namespace py = pybind11;
using namespace artup;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

PixelGrid to_grid(const U8Array& a) {
  if (a.ndim() == 2) {
    PixelGrid g(int(a.shape(1)), int(a.shape(0)), 1);
    std::memcpy(g.bytes().data(), a.data(), g.bytes().size());
    return g;
  }
  if (a.ndim() == 3 && (a.shape(2) == 3 || a.shape(2) == 1)) {
    PixelGrid g(int(a.shape(1)), int(a.shape(0)), int(a.shape(2)));
    std::memcpy(g.bytes().data(), a.data(), g.bytes().size());
    return g;
  }
  throw py::value_error("expected an HxW or HxWx3 uint8 array");
}

py::array_t<std::uint8_t> to_array(const PixelGrid& g) {
  std::vector<py::ssize_t> shape{g.height(), g.width()};
  if (g.channels() > 1) shape.push_back(g.channels());
  py::array_t<std::uint8_t> out(shape);
  std::memcpy(out.mutable_data(), g.bytes().data(), g.bytes().size());
  return out;
}

py::array_t<std::uint8_t> matrix_array(const qr::ModuleMatrix& m) {
  py::array_t<std::uint8_t> out({m.side(), m.side()});
  std::copy(m.cells().begin(), m.cells().end(), out.mutable_data());
  return out;
}

qr::ModuleMatrix array_matrix(const U8Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square module array");
  qr::ModuleMatrix m(int(a.shape(0)));
  auto v = a.unchecked<2>();
  for (int y = 0; y < m.side(); ++y)
    for (int x = 0; x < m.side(); ++x) m.set_dark(x, y, v(y, x) != 0);
  return m;
}

template <typename T>
py::array_t<T> grid_array(const Grid<T>& g) {
  py::array_t<T> out({g.height(), g.width()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const scan::ScanReport& r) {
  py::dict d;
  d["outcome"] = scan::to_string(r.outcome);
  d["payload"] = r.ok() ? py::object(py::bytes(r.payload.text())) : py::object(py::none());
  d["corrections"] = r.corrections;
  d["sampled"] = r.sampled ? py::object(matrix_array(*r.sampled)) : py::object(py::none());
  d["message"] = r.message;
  if (r.error_mask) d["errors"] = r.error_count();
  return d;
}

}  // namespace

PYBIND11_MODULE(_artup, m) {
  m.doc() = "Scanning-robust aesthetic QR codes";
  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def(
      "encode",
      [](const std::string& data, int version, const std::string& ec, int mask) {
        auto level = qr::parse_ec_level(ec);
        auto payload = qr::Payload::from_string(data);
        if (version == 0) {
          auto v = qr::min_version(int(payload.bytes.size()), level);
          if (!v) throw Error(ErrorCode::CapacityExceeded, "payload does not fit any supported version");
          version = *v;
        }
        return matrix_array(qr::encode_symbol(payload, {version, level, mask}));
      },
      py::arg("data"), py::arg("version") = 0, py::arg("ec") = "M", py::arg("mask") = 0,
      "Module matrix (1 = dark) of a standard QR code.");

  m.def(
      "render",
      [](const U8Array& matrix, int module_px, int quiet) {
        return to_array(qr::render(array_matrix(matrix), module_px, quiet));
      },
      py::arg("matrix"), py::arg("module_px") = 8, py::arg("quiet") = qr::kQuietZone);

  m.def(
      "decode",
      [](const U8Array& matrix) {
        auto d = qr::decode_matrix(array_matrix(matrix));
        py::dict out;
        out["payload"] = py::bytes(d.payload.text());
        out["version"] = d.spec.version;
        out["ec"] = std::string(1, qr::to_char(d.spec.ec));
        out["mask"] = d.spec.mask;
        out["corrections"] = d.corrections;
        return out;
      },
      py::arg("matrix"));

  m.def(
      "scan",
      [](const U8Array& image, std::optional<U8Array> truth) {
        auto img = to_grid(image);
        std::optional<qr::ModuleMatrix> gt;
        if (truth) gt = array_matrix(*truth);
        scan::ScanReport r;
        {
          py::gil_scoped_release release;
          r = scan::scan(img, gt ? &*gt : nullptr);
        }
        return report_dict(r);
      },
      py::arg("image"), py::arg("truth") = py::none());

  m.def(
      "hybrid_binarize", [](const U8Array& image) { return grid_array(scan::hybrid_binarize(to_grid(image))); },
      py::arg("image"), "1 = light.");

  m.def(
      "perturb",
      [](const U8Array& image, const std::string& kind, double parameter, std::uint64_t seed) {
        return to_array(bench::perturb(to_grid(image), bench::parse_kind(kind), parameter, {}, seed));
      },
      py::arg("image"), py::arg("kind"), py::arg("parameter"), py::arg("seed") = 0);

  m.def(
      "beautify",
      [](const U8Array& image, const std::string& data, py::object eta, int version, const std::string& ec, int mask,
         const std::string& omega, std::uint64_t seed, int size, double sigma2, double sigma3, bool verify) {
        BeautifyConfig cfg;
        cfg.payload = qr::Payload::from_string(data);
        if (py::isinstance<py::str>(eta)) {
          if (eta.cast<std::string>() != "map") throw py::value_error("eta must be a number or 'map'");
          cfg.eta_mode = EtaMode::Map;
        } else {
          cfg.eta = eta.cast<double>();
        }
        cfg.version = version;
        cfg.ec = qr::parse_ec_level(ec);
        cfg.mask = mask;
        std::string preset = omega;
        if (preset.rfind("image:", 0) == 0) {
          cfg.varpi.mask_image = preset.substr(6);
          preset = "image";
        }
        cfg.varpi.preset = lum::parse_varpi_preset(preset);
        cfg.varpi.seed = seed;
        cfg.size = size;
        cfg.sigma2 = sigma2;
        cfg.sigma3 = sigma3;
        cfg.verify = verify;
        auto img = to_grid(image);
        BeautifyResult r;
        {
          py::gil_scoped_release release;
          r = artup::beautify(img, cfg);
        }
        py::dict out;
        out["qb"] = matrix_array(r.binary.qb);
        out["qb_image"] = to_array(r.qb_image);
        out["qg"] = to_array(r.qg());
        out["qc"] = to_array(r.qc());
        out["module_prob"] = grid_array(r.luminance.module_prob);
        out["priority"] = grid_array(r.binary.priority.w);
        out["module_px"] = r.binary.layout.a;
        out["version"] = r.binary.spec.version;
        out["iterations"] = r.luminance.iterations;
        out["converged"] = r.luminance.converged;
        return out;
      },
      py::arg("image"), py::arg("data"), py::arg("eta") = 0.9, py::arg("version") = 0, py::arg("ec") = "M",
      py::arg("mask") = 0, py::arg("omega") = "gaussian", py::arg("seed") = 0, py::arg("size") = 512,
      py::arg("sigma2") = prob::kDefaultSigma2, py::arg("sigma3") = 0.0, py::arg("verify") = false);
}
