#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xpcsvd/analysis.hpp"
#include "xpcsvd/compress.hpp"
#include "xpcsvd/correlate.hpp"
#include "xpcsvd/encoder.hpp"
#include "xpcsvd/io.hpp"
#include "xpcsvd/synth.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

xpcs::Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) {
    throw xpcs::ShapeError("expected a 2-d array, got ndim = " +
                           std::to_string(a.ndim()));
  }
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + rows * cols);
  return xpcs::Matrix(rows, cols, std::move(data));
}

py::array_t<double> from_matrix(const xpcs::Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> from_vector(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

xpcs::GrayImage to_image(const DoubleArray& a) {
  if (a.ndim() != 2) {
    throw xpcs::ShapeError("reference image must be 2-d");
  }
  xpcs::GrayImage img;
  img.height = static_cast<std::size_t>(a.shape(0));
  img.width = static_cast<std::size_t>(a.shape(1));
  img.pixels.assign(a.data(), a.data() + img.height * img.width);
  return img;
}

xpcs::LagWindow to_window(std::pair<double, double> w) {
  return {w.first, w.second};
}

std::vector<double> to_row(const DoubleArray& a) {
  if (a.ndim() != 1) throw xpcs::ShapeError("expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.shape(0));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Homomorphic SVD compression for photon correlation analysis";

  auto base = py::register_exception<xpcs::Error>(m, "Error");
  py::register_exception<xpcs::ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<xpcs::ContractError>(m, "ContractError", base.ptr());
  py::register_exception<xpcs::RankError>(m, "RankError", base.ptr());
  py::register_exception<xpcs::BindingError>(m, "BindingError", base.ptr());
  py::register_exception<xpcs::FormatError>(m, "FormatError", base.ptr());
  py::register_exception<xpcs::NormalizationError>(m, "NormalizationError",
                                                   base.ptr());

  py::class_<xpcs::PixelMask>(m, "PixelMask")
      .def(py::init<std::size_t, std::vector<std::size_t>>(),
           py::arg("full_pixels"), py::arg("indices"))
      .def_readonly("full_pixels", &xpcs::PixelMask::full_pixels)
      .def_readonly("indices", &xpcs::PixelMask::indices)
      .def_property_readonly("count", &xpcs::PixelMask::count);

  py::class_<xpcs::FrameSeries>(m, "FrameSeries")
      .def(py::init([](const DoubleArray& intensities, double frame_period) {
             return xpcs::FrameSeries(to_matrix(intensities), frame_period);
           }),
           py::arg("intensities"), py::arg("frame_period") = 1.0)
      .def_property_readonly("n_frames", &xpcs::FrameSeries::n_frames)
      .def_property_readonly("n_pixels", &xpcs::FrameSeries::n_pixels)
      .def_readonly("frame_period", &xpcs::FrameSeries::frame_period)
      .def_property_readonly("intensities", [](const xpcs::FrameSeries& f) {
        return from_matrix(f.intensities);
      });

  py::enum_<xpcs::EncoderMode>(m, "EncoderMode")
      .value("OFFLINE", xpcs::EncoderMode::kOffline)
      .value("ONLINE_RELATED", xpcs::EncoderMode::kOnlineRelated)
      .value("ONLINE_UNRELATED", xpcs::EncoderMode::kOnlineUnrelated);

  py::class_<xpcs::EncodingMatrix>(m, "EncodingMatrix")
      .def_property_readonly("k", &xpcs::EncodingMatrix::k)
      .def_property_readonly("n_pixels", &xpcs::EncodingMatrix::n_pixels)
      .def_property_readonly("mode", &xpcs::EncodingMatrix::mode)
      .def_property_readonly(
          "v", [](const xpcs::EncodingMatrix& e) { return from_matrix(e.v()); })
      .def_property_readonly("spectrum", [](const xpcs::EncodingMatrix& e) {
        return from_vector(e.spectrum());
      });

  py::class_<xpcs::CompressedSeries>(m, "CompressedSeries")
      .def(py::init<std::size_t, std::uint64_t>(), py::arg("k"),
           py::arg("encoder_id"))
      .def_property_readonly("k", &xpcs::CompressedSeries::k)
      .def_property_readonly("encoder_id", &xpcs::CompressedSeries::encoder_id)
      .def_property_readonly("n_frames", &xpcs::CompressedSeries::n_frames)
      .def("append",
           [](xpcs::CompressedSeries& s, const DoubleArray& coeffs,
              double norm) { s.append(to_row(coeffs), norm); },
           py::arg("coefficients"), py::arg("norm"))
      .def_property_readonly("coefficients",
                             [](const xpcs::CompressedSeries& s) {
                               return from_matrix(
                                   s.snapshot().coefficient_matrix());
                             })
      .def_property_readonly("norms", [](const xpcs::CompressedSeries& s) {
        return from_vector(s.snapshot().norms);
      });

  py::class_<xpcs::TTCMatrix>(m, "TTCMatrix")
      .def_property_readonly("n", &xpcs::TTCMatrix::n)
      .def_property_readonly("lossless", &xpcs::TTCMatrix::lossless)
      .def_property_readonly("values", [](const xpcs::TTCMatrix& g) {
        return from_matrix(g.values());
      });

  py::class_<xpcs::G2Curve>(m, "G2Curve")
      .def_property_readonly(
          "lags", [](const xpcs::G2Curve& c) { return from_vector(c.lags); })
      .def_property_readonly(
          "values", [](const xpcs::G2Curve& c) { return from_vector(c.values); })
      .def_readonly("counts", &xpcs::G2Curve::counts);

  py::class_<xpcs::KwwFit>(m, "KwwFit")
      .def_readonly("baseline", &xpcs::KwwFit::baseline)
      .def_readonly("contrast", &xpcs::KwwFit::contrast)
      .def_readonly("relaxation_time", &xpcs::KwwFit::relaxation_time)
      .def_readonly("residual_rms", &xpcs::KwwFit::residual_rms);

  py::class_<xpcs::PeakVisibility>(m, "PeakVisibility")
      .def_readonly("peak_lag", &xpcs::PeakVisibility::peak_lag)
      .def_readonly("peak_value", &xpcs::PeakVisibility::peak_value)
      .def_readonly("baseline_value", &xpcs::PeakVisibility::baseline_value)
      .def_readonly("visibility", &xpcs::PeakVisibility::visibility);

  py::class_<xpcs::SpectrumReport>(m, "SpectrumReport")
      .def_property_readonly("spectrum",
                             [](const xpcs::SpectrumReport& r) {
                               return from_vector(r.spectrum);
                             })
      .def_readonly("suggested_k", &xpcs::SpectrumReport::suggested_k)
      .def_readonly("degenerate", &xpcs::SpectrumReport::degenerate);

  py::class_<xpcs::VisibilityReport>(m, "VisibilityReport")
      .def_readonly("peak_lag", &xpcs::VisibilityReport::peak_lag)
      .def_readonly("peak_value", &xpcs::VisibilityReport::peak_value)
      .def_readonly("baseline_value", &xpcs::VisibilityReport::baseline_value)
      .def_readonly("visibility", &xpcs::VisibilityReport::visibility)
      .def_readonly("ttc_background_sigma",
                    &xpcs::VisibilityReport::ttc_background_sigma)
      .def_readonly("detectable", &xpcs::VisibilityReport::detectable);

  // linalg
  m.def("gram_svd",
        [](const DoubleArray& x, double rel_tol) {
          const xpcs::SvdResult svd = xpcs::gram_svd(to_matrix(x), rel_tol);
          return py::make_tuple(from_matrix(svd.left_vectors),
                                from_vector(svd.singular_values),
                                from_matrix(svd.right_vectors));
        },
        py::arg("x"), py::arg("rel_tol") = 1e-12,
        "Thin SVD via the Gram-matrix trick; returns (U, sigma, V).");

  // model
  m.def("apply_mask", &xpcs::apply_mask, py::arg("frames"), py::arg("mask"));
  m.def("content_hash", &xpcs::content_hash, py::arg("encoder"));

  // synth
  m.def("gen_oscillatory", &xpcs::synth::gen_oscillatory, py::arg("n"),
        py::arg("m"), py::arg("period_frames"), py::arg("contrast"),
        py::arg("noise"), py::arg("seed"), py::arg("frame_period") = 1.0);
  m.def("gen_relaxation", &xpcs::synth::gen_relaxation, py::arg("n"),
        py::arg("m"), py::arg("rho"), py::arg("seed"),
        py::arg("frame_period") = 1.0);
  m.def("gen_shifted_corpus",
        [](const DoubleArray& reference, std::size_t r_samples,
           std::pair<std::size_t, std::size_t> frame_shape,
           std::uint64_t seed) {
          return xpcs::synth::gen_shifted_corpus(to_image(reference), r_samples,
                                                 frame_shape.first,
                                                 frame_shape.second, seed);
        },
        py::arg("reference"), py::arg("r_samples"), py::arg("frame_shape"),
        py::arg("seed"));
  m.def("make_texture",
        [](std::size_t width, std::size_t height, std::uint64_t seed) {
          const xpcs::GrayImage img = xpcs::synth::make_texture(width, height, seed);
          py::array_t<double> out({img.height, img.width});
          std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
          return out;
        },
        py::arg("width"), py::arg("height"), py::arg("seed"));

  // encoder
  m.def("build_offline", &xpcs::build_offline, py::arg("frames"));
  m.def("build_online",
        [](const DoubleArray& reference, std::size_t r_samples,
           std::pair<std::size_t, std::size_t> frame_shape, std::uint64_t seed,
           std::size_t k) {
          return xpcs::build_online(to_image(reference), r_samples,
                                    frame_shape.first, frame_shape.second,
                                    seed, k);
        },
        py::arg("reference"), py::arg("r_samples"), py::arg("frame_shape"),
        py::arg("seed"), py::arg("k"));
  m.def("build_online_from_frames", &xpcs::build_online_from_frames,
        py::arg("prior"), py::arg("k"));
  m.def("truncate", &xpcs::truncate, py::arg("encoder"), py::arg("k"));
  m.def("suggest_k", &xpcs::suggest_k, py::arg("encoder"),
        py::arg("factor") = 2.0);
  m.def("spectrum_report", &xpcs::spectrum_report, py::arg("encoder"));

  // compress
  m.def("compress_series", &xpcs::compress_series, py::arg("frames"),
        py::arg("encoder"));
  m.def("compress_frame",
        [](const DoubleArray& frame, const xpcs::EncodingMatrix& enc) {
          const auto [coeffs, norm] = xpcs::compress_frame(to_row(frame), enc);
          return py::make_tuple(from_vector(coeffs), norm);
        },
        py::arg("frame"), py::arg("encoder"));
  m.def("decompress",
        [](const xpcs::CompressedSeries& y, const xpcs::EncodingMatrix& enc) {
          return from_matrix(xpcs::decompress(y, enc));
        },
        py::arg("store"), py::arg("encoder"));

  // correlate
  m.def("ttc_raw", &xpcs::ttc_raw, py::arg("frames"));
  m.def("ttc_compressed", &xpcs::ttc_compressed, py::arg("store"));
  m.def("ttc_extend",
        [](const xpcs::TTCMatrix& g, const xpcs::CompressedSeries& y,
           const DoubleArray& new_row) {
          return xpcs::ttc_extend(g, y, to_row(new_row));
        },
        py::arg("ttc"), py::arg("store"), py::arg("new_row"));
  m.def("g2_from_ttc", &xpcs::g2_from_ttc, py::arg("ttc"),
        py::arg("frame_period") = 1.0);
  m.def("ttc_rel_error",
        static_cast<double (*)(const xpcs::TTCMatrix&, const xpcs::TTCMatrix&)>(
            &xpcs::ttc_rel_error),
        py::arg("ttc"), py::arg("ttc_approx"));

  // analysis
  m.def("fit_kww",
        [](const xpcs::G2Curve& curve, std::pair<double, double> window) {
          return xpcs::fit_kww(curve, to_window(window));
        },
        py::arg("curve"), py::arg("lag_window"));
  m.def("peak_visibility",
        [](const xpcs::G2Curve& curve, std::pair<double, double> peak,
           std::pair<double, double> baseline) {
          return xpcs::peak_visibility(curve, to_window(peak),
                                       to_window(baseline));
        },
        py::arg("curve"), py::arg("peak_window"), py::arg("baseline_window"));
  m.def("ttc_background", &xpcs::ttc_background, py::arg("ttc"),
        py::arg("exclusion") = 0);
  m.def("detectability", &xpcs::detectability, py::arg("visibility"),
        py::arg("background_sigma"));
  m.def("make_visibility_report",
        [](const xpcs::G2Curve& curve, const xpcs::TTCMatrix& ttc,
           std::pair<double, double> peak, std::pair<double, double> baseline,
           std::size_t exclusion) {
          return xpcs::make_visibility_report(curve, ttc, to_window(peak),
                                              to_window(baseline), exclusion);
        },
        py::arg("curve"), py::arg("ttc"), py::arg("peak_window"),
        py::arg("baseline_window"), py::arg("exclusion") = 0);

  // io
  m.def("write_frames",
        [](const std::string& path, const xpcs::FrameSeries& frames,
           const std::string& dtype) {
          xpcs::io::FrameDtype d = xpcs::io::FrameDtype::kF64;
          if (dtype == "u16") d = xpcs::io::FrameDtype::kU16;
          else if (dtype == "f32") d = xpcs::io::FrameDtype::kF32;
          else if (dtype != "f64")
            throw xpcs::ContractError("dtype must be u16, f32, or f64");
          xpcs::io::write_frames(path, frames, d);
        },
        py::arg("path"), py::arg("frames"), py::arg("dtype") = "f64");
  m.def("read_frames", &xpcs::io::read_frames, py::arg("path"));
  m.def("write_mask", &xpcs::io::write_mask, py::arg("path"), py::arg("mask"));
  m.def("read_mask", &xpcs::io::read_mask, py::arg("path"));
  m.def("write_encoder", &xpcs::io::write_encoder, py::arg("path"),
        py::arg("encoder"));
  m.def("read_encoder", &xpcs::io::read_encoder, py::arg("path"));
  m.def("write_compressed", &xpcs::io::write_compressed, py::arg("path"),
        py::arg("store"));
  m.def("read_compressed", &xpcs::io::read_compressed, py::arg("path"));
  m.def("export_g2_csv", &xpcs::io::export_g2_csv, py::arg("path"),
        py::arg("curve"));
  m.def("export_ttc_csv", &xpcs::io::export_ttc_csv, py::arg("path"),
        py::arg("ttc"));
  m.def("read_pgm",
        [](const std::string& path) {
          const xpcs::GrayImage img = xpcs::io::read_pgm(path);
          py::array_t<double> out({img.height, img.width});
          std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
          return out;
        },
        py::arg("path"));
}
