#include "xpcsvd/compress.hpp"

#include <cmath>
#include <string>

namespace xpcs {

namespace {

// coeffs[j] = sum_m row[m] * v(m, j), accumulated in ascending m so the
// batch and streaming paths agree bitwise.
void project_row(std::span<const double> row, const Matrix& v,
                 std::span<double> coeffs) {
  const std::size_t k = v.cols();
  for (std::size_t j = 0; j < k; ++j) coeffs[j] = 0.0;
  for (std::size_t m = 0; m < v.rows(); ++m) {
    const double xv = row[m];
    if (xv == 0.0) continue;
    const auto vrow = v.row(m);
    for (std::size_t j = 0; j < k; ++j) coeffs[j] += xv * vrow[j];
  }
}

void check_pixel_count(std::size_t frame_pixels, const EncodingMatrix& enc) {
  if (frame_pixels != enc.n_pixels()) {
    throw ShapeError("frame has " + std::to_string(frame_pixels) +
                     " pixels, encoder expects " +
                     std::to_string(enc.n_pixels()));
  }
}

}  // namespace

std::pair<std::vector<double>, double> compress_frame(
    std::span<const double> frame, const EncodingMatrix& enc) {
  check_pixel_count(frame.size(), enc);
  const double norm = std::sqrt(dot(frame, frame));
  if (norm == 0.0) {
    throw NormalizationError("compress_frame: frame has zero norm", 0);
  }
  std::vector<double> normalized(frame.size());
  for (std::size_t m = 0; m < frame.size(); ++m) normalized[m] = frame[m] / norm;
  std::vector<double> coeffs(enc.k());
  project_row(normalized, enc.v(), coeffs);
  return {std::move(coeffs), norm};
}

CompressedSeries compress_series(const FrameSeries& frames,
                                 const EncodingMatrix& enc) {
  check_pixel_count(frames.n_pixels(), enc);
  const std::size_t n = frames.n_frames();
  const std::size_t k = enc.k();

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = frames.intensities.row(i);
    norms[i] = std::sqrt(dot(row, row));
    if (norms[i] == 0.0) {
      throw NormalizationError(
          "compress_series: frame " + std::to_string(i) + " has zero norm", i);
    }
  }

  // Row at a time, identical arithmetic to compress_frame. Frames are
  // independent, so the parallel split cannot change any row's bits.
  std::vector<double> coeffs(n * k);
  const std::size_t grain =
      std::max<std::size_t>(1, (1u << 22) / (frames.n_pixels() * k + 1));
  parallel_for(n, grain, [&](std::size_t r0, std::size_t r1) {
    std::vector<double> normalized(frames.n_pixels());
    for (std::size_t i = r0; i < r1; ++i) {
      const auto row = frames.intensities.row(i);
      for (std::size_t m = 0; m < row.size(); ++m)
        normalized[m] = row[m] / norms[i];
      project_row(normalized, enc.v(), {coeffs.data() + i * k, k});
    }
  });

  return CompressedSeries(k, content_hash_u64(enc), std::move(coeffs),
                          std::move(norms));
}

Matrix decompress(const CompressedSeries& y, const EncodingMatrix& enc) {
  if (y.encoder_id() != content_hash_u64(enc)) {
    throw BindingError(
        "store was compressed with a different encoder (content hash "
        "mismatch)");
  }
  const auto snap = y.snapshot();
  const Matrix ym = snap.coefficient_matrix();
  const std::size_t n = ym.rows();
  const std::size_t m = enc.n_pixels();
  Matrix out(n, m);
  const std::size_t grain = std::max<std::size_t>(1, (1u << 21) / (m + 1));
  parallel_for(n, grain, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i) {
      const auto yi = ym.row(i);
      auto oi = out.row(i);
      for (std::size_t mm = 0; mm < m; ++mm) oi[mm] = dot(yi, enc.v().row(mm));
    }
  });
  return out;
}

}  // namespace xpcs
