#ifndef XPCSVD_ANALYSIS_HPP_
#define XPCSVD_ANALYSIS_HPP_

#include <vector>

#include "xpcsvd/model.hpp"

namespace xpcs {

// Result of fitting g2(dt) = B + C * exp(-2 dt / t0).
struct KwwFit {
  double baseline = 0.0;         // B
  double contrast = 0.0;         // C
  double relaxation_time = 0.0;  // t0, seconds, > 0
  double residual_rms = 0.0;
};

// Initialization produced no decaying component (C <= 0).
class FitDegenerateError : public Error {
 public:
  using Error::Error;
};

// The refinement did not converge; best() is the last accepted iterate.
class FitError : public Error {
 public:
  FitError(const std::string& msg, KwwFit best) : Error(msg), best_(best) {}
  const KwwFit& best() const { return best_; }

 private:
  KwwFit best_;
};

// Closed lag window [min_lag, max_lag] in the curve's lag units (seconds).
struct LagWindow {
  double min_lag;
  double max_lag;
};

// Least-squares KWW fit over the window. Initialization: B from the last
// tenth of the window, C from the first point, t0 from the first crossing
// of exp(-2); refined by damped Gauss-Newton until the relative step drops
// below 1e-10 (at most 200 iterations).
KwwFit fit_kww(const G2Curve& curve, const LagWindow& window);

struct PeakVisibility {
  double peak_lag = 0.0;
  double peak_value = 0.0;
  double baseline_value = 0.0;
  double visibility = 0.0;  // peak - baseline
};

// Peak = maximum over the peak window, baseline = median over the baseline
// window (robust to secondary peaks). Windows must not overlap.
PeakVisibility peak_visibility(const G2Curve& curve,
                               const LagWindow& peak_window,
                               const LagWindow& baseline_window);

// Standard deviation of TTC entries farther than `exclusion` frames from
// the diagonal (0 excludes the diagonal alone).
double ttc_background(const TTCMatrix& g, std::size_t exclusion = 0);

// A correlation feature counts as detectable when its visibility exceeds
// twice the TTC background level.
bool detectability(double visibility, double background_sigma);

struct SpectrumReport {
  std::vector<double> spectrum;  // descending
  std::size_t suggested_k = 0;   // suggest_k at factor 2
  bool degenerate = false;       // flat spectrum, the heuristic returned 0
};

SpectrumReport spectrum_report(const EncodingMatrix& enc);

struct VisibilityReport {
  double peak_lag = 0.0;
  double peak_value = 0.0;
  double baseline_value = 0.0;
  double visibility = 0.0;
  double ttc_background_sigma = 0.0;
  bool detectable = false;
};

VisibilityReport make_visibility_report(const G2Curve& curve,
                                        const TTCMatrix& ttc,
                                        const LagWindow& peak_window,
                                        const LagWindow& baseline_window,
                                        std::size_t exclusion = 0);

}  // namespace xpcs

#endif  // XPCSVD_ANALYSIS_HPP_
