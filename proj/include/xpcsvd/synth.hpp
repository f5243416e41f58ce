#ifndef XPCSVD_SYNTH_HPP_
#define XPCSVD_SYNTH_HPP_

#include <cstdint>

#include "xpcsvd/model.hpp"

namespace xpcs::synth {

// Speckle series whose frames blend two independent exponential speckle
// fields A and B with weight w_t = contrast * sin^2(pi t / period_frames),
// plus optional fresh Gaussian noise per frame (clipped at zero). The raw
// TTC shows ridges at lags that are multiples of period_frames.
FrameSeries gen_oscillatory(std::size_t n, std::size_t m, double period_frames,
                            double contrast, double noise, std::uint64_t seed,
                            double frame_period = 1.0);

// Relaxing speckle series: each pixel carries a complex Gaussian field
// evolving as an AR(1) chain with per-frame factor rho, and the intensity
// is a positive base field times |field|^2 (fully developed speckle, so
// intensities are exponentially distributed). Intensity correlations decay
// as rho^(2 dt), i.e. exp(-2 dt / t0) with t0 = -1/ln(rho) frames.
FrameSeries gen_relaxation(std::size_t n, std::size_t m, double rho,
                           std::uint64_t seed, double frame_period = 1.0);

// Corpus of cyclically shifted copies of a reference image: sample i is the
// reference shifted by uniform offsets, center-cropped to frame_shape and
// flattened row-major. This is the training set for shifted-corpus
// encoders, exposed for inspection.
FrameSeries gen_shifted_corpus(const GrayImage& reference,
                               std::size_t r_samples, std::size_t frame_h,
                               std::size_t frame_w, std::uint64_t seed);

// Positive random texture with a broad spatial spectrum; handy as a
// license-free stand-in reference image.
GrayImage make_texture(std::size_t width, std::size_t height,
                       std::uint64_t seed);

}  // namespace xpcs::synth

#endif  // XPCSVD_SYNTH_HPP_
