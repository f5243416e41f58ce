#include "xpcsvd/encoder.hpp"

#include <string>
#include <utility>

#include "xpcsvd/synth.hpp"

namespace xpcs {

namespace {

// Shared back end: normalized rows -> Gram-trick SVD -> right vectors.
EncodingMatrix encoder_from_rows(const Matrix& rows, EncoderMode mode,
                                 std::size_t k /* 0 = full rank */) {
  SvdResult svd = gram_svd(row_normalize(rows).first);
  const std::size_t rank = svd.singular_values.size();
  if (k == 0) k = rank;
  if (k > rank) {
    throw RankError("requested k = " + std::to_string(k) +
                        " exceeds the numerical rank " + std::to_string(rank) +
                        " of the training rows",
                    rank);
  }
  Matrix vk(svd.right_vectors.rows(), k);
  for (std::size_t i = 0; i < vk.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) vk(i, j) = svd.right_vectors(i, j);
  return EncodingMatrix(std::move(vk), std::move(svd.singular_values), mode);
}

}  // namespace

EncodingMatrix build_offline(const FrameSeries& frames) {
  if (frames.n_frames() < 2) {
    throw ContractError("build_offline: need at least 2 frames");
  }
  return encoder_from_rows(frames.intensities, EncoderMode::kOffline, 0);
}

EncodingMatrix build_online(const GrayImage& reference, std::size_t r_samples,
                            std::size_t frame_h, std::size_t frame_w,
                            std::uint64_t seed, std::size_t k) {
  if (k < 1) throw ContractError("build_online: k must be >= 1");
  if (r_samples < k) {
    throw ContractError("build_online: r_samples = " +
                        std::to_string(r_samples) + " below k = " +
                        std::to_string(k));
  }
  const FrameSeries corpus =
      synth::gen_shifted_corpus(reference, r_samples, frame_h, frame_w, seed);
  return encoder_from_rows(corpus.intensities, EncoderMode::kOnlineUnrelated, k);
}

EncodingMatrix build_online_from_frames(const FrameSeries& prior,
                                        std::size_t k) {
  if (k < 1) throw ContractError("build_online_from_frames: k must be >= 1");
  if (prior.n_frames() < 2) {
    throw ContractError("build_online_from_frames: need at least 2 frames");
  }
  return encoder_from_rows(prior.intensities, EncoderMode::kOnlineRelated, k);
}

EncodingMatrix truncate(const EncodingMatrix& enc, std::size_t k) {
  if (k < 1 || k > enc.k()) {
    throw ContractError("truncate: k = " + std::to_string(k) +
                        " outside [1, " + std::to_string(enc.k()) + "]");
  }
  if (k == enc.k()) return enc;
  Matrix vk(enc.n_pixels(), k);
  for (std::size_t i = 0; i < vk.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) vk(i, j) = enc.v()(i, j);
  return EncodingMatrix(std::move(vk), enc.spectrum(), enc.mode());
}

std::size_t suggest_k(const EncodingMatrix& enc, double factor) {
  if (!(factor > 1.0)) {
    throw ContractError("suggest_k: factor must be > 1");
  }
  const auto& spectrum = enc.spectrum();
  const double cutoff = factor * spectrum.back();
  std::size_t count = 0;
  for (double s : spectrum) {
    if (s > cutoff) ++count;
  }
  return count;
}

}  // namespace xpcs
