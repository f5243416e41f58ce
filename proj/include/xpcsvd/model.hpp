#ifndef XPCSVD_MODEL_HPP_
#define XPCSVD_MODEL_HPP_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "xpcsvd/linalg.hpp"

namespace xpcs {

// Subset of detector pixels (a q-range selection). Indices are strictly
// ascending and all below full_pixels.
struct PixelMask {
  std::size_t full_pixels;
  std::vector<std::size_t> indices;

  PixelMask(std::size_t full_pixels, std::vector<std::size_t> indices);
  std::size_t count() const { return indices.size(); }
};

// A detector time series: N frames of M pixels each, flattened row-major
// into an N x M non-negative matrix.
struct FrameSeries {
  Matrix intensities;
  double frame_period = 1.0;  // seconds between frames
  std::optional<PixelMask> mask;

  FrameSeries(Matrix intensities, double frame_period = 1.0,
              std::optional<PixelMask> mask = std::nullopt);

  std::size_t n_frames() const { return intensities.rows(); }
  std::size_t n_pixels() const { return intensities.cols(); }
};

// Restricts a full-detector series to the masked pixel subset, preserving
// mask index order.
FrameSeries apply_mask(const FrameSeries& frames, const PixelMask& mask);

enum class EncoderMode : std::uint8_t {
  kOffline = 0,         // built from the data itself
  kOnlineRelated = 1,   // built from a prior measurement of the same sample
  kOnlineUnrelated = 2, // built from a shifted-reference corpus
};

const char* to_string(EncoderMode mode);

// Projection basis: M x K matrix with orthonormal columns, plus the full
// singular-value spectrum of the corpus it came from (kept beyond K for
// diagnostics).
class EncodingMatrix {
 public:
  EncodingMatrix(Matrix v, std::vector<double> spectrum, EncoderMode mode);

  const Matrix& v() const { return v_; }
  const std::vector<double>& spectrum() const { return spectrum_; }
  EncoderMode mode() const { return mode_; }
  std::size_t k() const { return v_.cols(); }
  std::size_t n_pixels() const { return v_.rows(); }

 private:
  Matrix v_;
  std::vector<double> spectrum_;
  EncoderMode mode_;
};

// 64-bit content digest over dimensions, mode, and the bit pattern of V.
// Binds a compressed store to the encoder that produced it.
std::uint64_t content_hash_u64(const EncodingMatrix& enc);
std::string content_hash(const EncodingMatrix& enc);

// Grayscale image, used as the reference for shifted-corpus encoders.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;  // row-major, height x width

  double at(std::size_t y, std::size_t x) const {
    return pixels[y * width + x];
  }
};

// Projection coefficients of the series, one row of K values per frame,
// plus the Frobenius norm each frame had before normalization. Appending
// is single-writer; snapshot() hands readers a consistent prefix.
class CompressedSeries {
 public:
  CompressedSeries(std::size_t k, std::uint64_t encoder_id);
  CompressedSeries(std::size_t k, std::uint64_t encoder_id,
                   std::vector<double> coefficients,
                   std::vector<double> norms);

  CompressedSeries(const CompressedSeries& other);
  CompressedSeries& operator=(const CompressedSeries& other);

  std::size_t k() const { return k_; }
  std::uint64_t encoder_id() const { return encoder_id_; }

  void append(std::span<const double> coefficients, double norm);

  std::size_t n_frames() const;

  struct Snapshot {
    std::size_t k;
    std::uint64_t encoder_id;
    std::vector<double> coefficients;  // n x k row-major
    std::vector<double> norms;         // length n

    std::size_t n_frames() const { return norms.size(); }
    Matrix coefficient_matrix() const;
  };
  Snapshot snapshot() const;

 private:
  std::size_t k_;
  std::uint64_t encoder_id_;
  std::vector<double> coefficients_;
  std::vector<double> norms_;
  mutable std::mutex mutex_;
};

// Two-time correlation matrix G (or its low-rank approximation). Entries
// obey the Cauchy-Schwarz bound |G_ij| <= 1 for unit-norm rows;
// lossless means the diagonal is exactly 1 up to roundoff.
class TTCMatrix {
 public:
  TTCMatrix(Matrix values, bool lossless);

  std::size_t n() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  bool lossless() const { return lossless_; }

 private:
  Matrix values_;
  bool lossless_;
};

// Lag-indexed correlation curve derived from a TTC. lags[d] is in seconds
// (frame lag times frame_period); counts[d] = N - d pairs were averaged.
struct G2Curve {
  std::vector<double> lags;
  std::vector<double> values;
  std::vector<std::size_t> counts;
};

}  // namespace xpcs

#endif  // XPCSVD_MODEL_HPP_
