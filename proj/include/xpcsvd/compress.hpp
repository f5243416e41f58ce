#ifndef XPCSVD_COMPRESS_HPP_
#define XPCSVD_COMPRESS_HPP_

#include <utility>
#include <vector>

#include "xpcsvd/model.hpp"

namespace xpcs {

// Whole-series compression: Y = row_normalize(X) * V_K. Frame norms are
// recorded and the store is bound to the encoder by content hash.
// Compressing frame by frame and appending yields bitwise the same store.
CompressedSeries compress_series(const FrameSeries& frames,
                                 const EncodingMatrix& enc);

// Single-frame compression for the streaming workflow: coefficients of
// frame/|frame| against the encoder columns, plus the norm for the store.
std::pair<std::vector<double>, double> compress_frame(
    std::span<const double> frame, const EncodingMatrix& enc);

// X~ = Y * V_K^T at normalized scale. Errors if the store was produced by
// a different encoder.
Matrix decompress(const CompressedSeries& y, const EncodingMatrix& enc);

}  // namespace xpcs

#endif  // XPCSVD_COMPRESS_HPP_
