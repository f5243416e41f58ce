#include "xpcsvd/correlate.hpp"

#include <cmath>
#include <string>

namespace xpcs {

namespace {

bool unit_diagonal(const Matrix& g) {
  for (std::size_t i = 0; i < g.rows(); ++i) {
    if (std::abs(g(i, i) - 1.0) > 1e-10) return false;
  }
  return true;
}

}  // namespace

TTCMatrix ttc_raw(const FrameSeries& frames) {
  if (frames.n_frames() < 2) {
    throw ContractError("ttc_raw: need at least 2 frames");
  }
  Matrix g = gram(row_normalize(frames.intensities).first);
  return TTCMatrix(std::move(g), true);
}

TTCMatrix ttc_compressed(const CompressedSeries& y) {
  const auto snap = y.snapshot();
  if (snap.n_frames() < 2) {
    throw ContractError("ttc_compressed: need at least 2 frames");
  }
  Matrix g = gram(snap.coefficient_matrix());
  const bool lossless = unit_diagonal(g);
  return TTCMatrix(std::move(g), lossless);
}

TTCMatrix ttc_extend(const TTCMatrix& g, const CompressedSeries& y,
                     std::span<const double> new_row) {
  const auto snap = y.snapshot();
  const std::size_t n = g.n();
  if (snap.n_frames() != n) {
    throw ShapeError("ttc_extend: TTC covers " + std::to_string(n) +
                     " frames but store holds " +
                     std::to_string(snap.n_frames()));
  }
  if (new_row.size() != snap.k) {
    throw ShapeError("ttc_extend: new row has " +
                     std::to_string(new_row.size()) +
                     " coefficients, store holds k = " +
                     std::to_string(snap.k));
  }

  Matrix out(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = g.values()(i, j);
  for (std::size_t i = 0; i < n; ++i) {
    const double v =
        dot({snap.coefficients.data() + i * snap.k, snap.k}, new_row);
    out(i, n) = v;
    out(n, i) = v;
  }
  out(n, n) = dot(new_row, new_row);
  const bool lossless = unit_diagonal(out);
  return TTCMatrix(std::move(out), lossless);
}

G2Curve g2_from_ttc(const TTCMatrix& g, double frame_period) {
  if (g.n() < 2) throw ContractError("g2_from_ttc: need at least 2 frames");
  if (!(frame_period > 0.0)) {
    throw ContractError("g2_from_ttc: frame_period must be positive");
  }
  const std::size_t n = g.n();
  G2Curve curve;
  curve.lags.resize(n);
  curve.values.resize(n);
  curve.counts.resize(n);
  for (std::size_t d = 0; d < n; ++d) {
    double acc = 0.0;
    for (std::size_t t = 0; t + d < n; ++t) acc += g.values()(t, t + d);
    curve.lags[d] = static_cast<double>(d) * frame_period;
    curve.counts[d] = n - d;
    curve.values[d] = acc / static_cast<double>(n - d);
  }
  return curve;
}

double ttc_rel_error(const Matrix& g, const Matrix& g_approx) {
  if (g.rows() != g_approx.rows() || g.cols() != g_approx.cols()) {
    throw ShapeError("ttc_rel_error: sizes " + std::to_string(g.rows()) +
                     " vs " + std::to_string(g_approx.rows()));
  }
  double num = 0.0, den = 0.0;
  const auto a = g.data();
  const auto b = g_approx.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += a[i] * a[i];
  }
  if (den == 0.0) {
    throw ContractError("ttc_rel_error: reference TTC is all zero");
  }
  return std::sqrt(num / den);
}

double ttc_rel_error(const TTCMatrix& g, const TTCMatrix& g_approx) {
  return ttc_rel_error(g.values(), g_approx.values());
}

}  // namespace xpcs
