#ifndef XPCSVD_ENCODER_HPP_
#define XPCSVD_ENCODER_HPP_

#include <cstdint>

#include "xpcsvd/model.hpp"

namespace xpcs {

// Encoder from the series itself: row-normalize, Gram-trick SVD, keep all
// numerical-rank right vectors with the full spectrum.
EncodingMatrix build_offline(const FrameSeries& frames);

// Encoder from a corpus of randomly shifted copies of a reference image
// (sample-agnostic). Requires k within the corpus numerical rank.
EncodingMatrix build_online(const GrayImage& reference, std::size_t r_samples,
                            std::size_t frame_h, std::size_t frame_w,
                            std::uint64_t seed, std::size_t k);

// Encoder from frames of a previous measurement of the same sample.
EncodingMatrix build_online_from_frames(const FrameSeries& prior,
                                        std::size_t k);

// First k columns (the highest singular values); the full spectrum is kept.
EncodingMatrix truncate(const EncodingMatrix& enc, std::size_t k);

// Spectrum heuristic for the smallest useful K: the number of singular
// values strictly above factor times the spectrum minimum. A flat spectrum
// yields 0 (degenerate).
std::size_t suggest_k(const EncodingMatrix& enc, double factor = 2.0);

}  // namespace xpcs

#endif  // XPCSVD_ENCODER_HPP_
