#include "xpcsvd/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <utility>

namespace xpcs {

PixelMask::PixelMask(std::size_t full, std::vector<std::size_t> idx)
    : full_pixels(full), indices(std::move(idx)) {
  if (indices.empty()) {
    throw MaskError("pixel mask selects no pixels");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= full_pixels) {
      throw MaskError("mask index " + std::to_string(indices[i]) +
                      " out of range for " + std::to_string(full_pixels) +
                      " pixels");
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw MaskError("mask indices not strictly ascending at position " +
                      std::to_string(i));
    }
  }
}

FrameSeries::FrameSeries(Matrix m, double period, std::optional<PixelMask> msk)
    : intensities(std::move(m)), frame_period(period), mask(std::move(msk)) {
  if (!(frame_period > 0.0) || !std::isfinite(frame_period)) {
    throw ContractError("frame_period must be positive and finite");
  }
  for (double v : intensities.data()) {
    if (v < 0.0) throw ContractError("negative intensity in frame series");
  }
  if (mask && mask->count() != n_pixels()) {
    throw MaskError("mask selects " + std::to_string(mask->count()) +
                    " pixels but series has " + std::to_string(n_pixels()));
  }
}

FrameSeries apply_mask(const FrameSeries& frames, const PixelMask& mask) {
  if (frames.mask) {
    throw MaskError("series is already masked");
  }
  if (mask.full_pixels != frames.n_pixels()) {
    throw MaskError("mask covers " + std::to_string(mask.full_pixels) +
                    " pixels but frames have " +
                    std::to_string(frames.n_pixels()));
  }
  const std::size_t n = frames.n_frames();
  Matrix out(n, mask.count());
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = frames.intensities.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < mask.count(); ++j) dst[j] = src[mask.indices[j]];
  }
  return FrameSeries(std::move(out), frames.frame_period, mask);
}

const char* to_string(EncoderMode mode) {
  switch (mode) {
    case EncoderMode::kOffline: return "offline";
    case EncoderMode::kOnlineRelated: return "online-related";
    case EncoderMode::kOnlineUnrelated: return "online-unrelated";
  }
  return "unknown";
}

EncodingMatrix::EncodingMatrix(Matrix v, std::vector<double> spectrum,
                               EncoderMode mode)
    : v_(std::move(v)), spectrum_(std::move(spectrum)), mode_(mode) {
  if (spectrum_.size() < v_.cols()) {
    throw ContractError("encoder spectrum shorter than column count");
  }
  for (std::size_t i = 0; i + 1 < spectrum_.size(); ++i) {
    if (spectrum_[i] < spectrum_[i + 1]) {
      throw ContractError("encoder spectrum not descending at index " +
                          std::to_string(i));
    }
  }
  const Matrix vtv = gram_of_columns(v_);
  for (std::size_t i = 0; i < vtv.rows(); ++i) {
    for (std::size_t j = 0; j < vtv.cols(); ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(vtv(i, j) - expect) > 1e-10) {
        throw ContractError("encoder columns not orthonormal: |V^T V - I| = " +
                            std::to_string(std::abs(vtv(i, j) - expect)) +
                            " at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
      }
    }
  }
}

namespace {

// FNV-1a, 64-bit.
struct Fnv1a {
  std::uint64_t state = 0xCBF29CE484222325ULL;
  void feed(const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
      state ^= p[i];
      state *= 0x100000001B3ULL;
    }
  }
  void feed_u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    feed(b, 8);
  }
};

}  // namespace

std::uint64_t content_hash_u64(const EncodingMatrix& enc) {
  Fnv1a h;
  h.feed("XENC", 4);
  const std::uint8_t mode = static_cast<std::uint8_t>(enc.mode());
  h.feed(&mode, 1);
  h.feed_u64(enc.n_pixels());
  h.feed_u64(enc.k());
  for (double v : enc.v().data()) h.feed_u64(std::bit_cast<std::uint64_t>(v));
  return h.state;
}

std::string content_hash(const EncodingMatrix& enc) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = content_hash_u64(enc);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

CompressedSeries::CompressedSeries(std::size_t k, std::uint64_t encoder_id)
    : k_(k), encoder_id_(encoder_id) {
  if (k_ == 0) throw ContractError("compressed series needs k >= 1");
}

CompressedSeries::CompressedSeries(std::size_t k, std::uint64_t encoder_id,
                                   std::vector<double> coefficients,
                                   std::vector<double> norms)
    : k_(k), encoder_id_(encoder_id) {
  if (k_ == 0) throw ContractError("compressed series needs k >= 1");
  if (coefficients.size() != norms.size() * k_) {
    throw ShapeError("coefficient count does not match norms length");
  }
  for (std::size_t i = 0; i < norms.size(); ++i) {
    append({coefficients.data() + i * k_, k_}, norms[i]);
  }
}

CompressedSeries::CompressedSeries(const CompressedSeries& other)
    : k_(other.k_), encoder_id_(other.encoder_id_) {
  std::lock_guard lock(other.mutex_);
  coefficients_ = other.coefficients_;
  norms_ = other.norms_;
}

CompressedSeries& CompressedSeries::operator=(const CompressedSeries& other) {
  if (this == &other) return *this;
  Snapshot snap = other.snapshot();
  std::lock_guard lock(mutex_);
  k_ = snap.k;
  encoder_id_ = snap.encoder_id;
  coefficients_ = std::move(snap.coefficients);
  norms_ = std::move(snap.norms);
  return *this;
}

void CompressedSeries::append(std::span<const double> coefficients,
                              double norm) {
  if (coefficients.size() != k_) {
    throw ShapeError("append: row has " + std::to_string(coefficients.size()) +
                     " coefficients, store holds k = " + std::to_string(k_));
  }
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ContractError("append: frame norm must be positive and finite");
  }
  double sq = 0.0;
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw ContractError("append: non-finite coefficient");
    sq += c * c;
  }
  if (sq > (1.0 + 1e-10) * (1.0 + 1e-10)) {
    throw ContractError("append: coefficient row norm " +
                        std::to_string(std::sqrt(sq)) +
                        " exceeds 1 (not a projection of a unit row)");
  }
  std::lock_guard lock(mutex_);
  coefficients_.insert(coefficients_.end(), coefficients.begin(),
                       coefficients.end());
  norms_.push_back(norm);
}

std::size_t CompressedSeries::n_frames() const {
  std::lock_guard lock(mutex_);
  return norms_.size();
}

CompressedSeries::Snapshot CompressedSeries::snapshot() const {
  std::lock_guard lock(mutex_);
  return Snapshot{k_, encoder_id_, coefficients_, norms_};
}

Matrix CompressedSeries::Snapshot::coefficient_matrix() const {
  return Matrix(n_frames(), k, coefficients);
}

TTCMatrix::TTCMatrix(Matrix values, bool lossless)
    : values_(std::move(values)), lossless_(lossless) {
  const std::size_t n = values_.rows();
  if (values_.cols() != n) {
    throw ShapeError("TTC matrix must be square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (values_(i, j) != values_(j, i)) {
        throw ContractError("TTC matrix not symmetric at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (values_(i, j) < -1.0 - 1e-10 || values_(i, j) > 1.0 + 1e-10) {
        throw ContractError("TTC entry out of [-1, 1] bounds at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
    const double d = values_(i, i);
    if (d < 0.0) {
      throw ContractError("TTC diagonal negative at " + std::to_string(i));
    }
    if (lossless_ && std::abs(d - 1.0) > 1e-10) {
      throw ContractError("lossless TTC diagonal deviates from 1 at " +
                          std::to_string(i));
    }
  }
}

}  // namespace xpcs
