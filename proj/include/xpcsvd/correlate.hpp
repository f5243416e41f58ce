#ifndef XPCSVD_CORRELATE_HPP_
#define XPCSVD_CORRELATE_HPP_

#include "xpcsvd/model.hpp"

namespace xpcs {

// Exact two-time correlation of the raw series: G = Xn Xn^T with
// row-normalized frames. Diagonal is 1 up to roundoff.
TTCMatrix ttc_raw(const FrameSeries& frames);

// Two-time correlation directly on compressed coefficients: G~ = Y Y^T,
// no decompression. Marked lossless when every coefficient row kept unit
// norm (the projection did not lose anything).
TTCMatrix ttc_compressed(const CompressedSeries& y);

// Grows an existing TTC by one frame: new column entries are Y * row^T and
// the corner is |row|^2. Equals a full recomputation bitwise. `g` must be
// the TTC of the rows currently in `y`; the new row is appended to the
// store separately.
TTCMatrix ttc_extend(const TTCMatrix& g, const CompressedSeries& y,
                     std::span<const double> new_row);

// Diagonal-average g2: g2[d] = mean over t of G(t, t+d), lag d in frames
// converted to seconds with frame_period.
G2Curve g2_from_ttc(const TTCMatrix& g, double frame_period);

// |G - G~|_F / |G|_F.
double ttc_rel_error(const Matrix& g, const Matrix& g_approx);
double ttc_rel_error(const TTCMatrix& g, const TTCMatrix& g_approx);

}  // namespace xpcs

#endif  // XPCSVD_CORRELATE_HPP_
