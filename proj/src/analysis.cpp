#include "xpcsvd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xpcsvd/encoder.hpp"

namespace xpcs {

namespace {

struct WindowPoints {
  std::vector<double> lags;
  std::vector<double> values;
};

WindowPoints select_window(const G2Curve& curve, const LagWindow& w,
                           const char* what) {
  if (!(w.min_lag <= w.max_lag)) {
    throw ContractError(std::string(what) + ": window is empty (min > max)");
  }
  WindowPoints out;
  for (std::size_t d = 0; d < curve.lags.size(); ++d) {
    const double lag = curve.lags[d];
    if (lag >= w.min_lag && lag <= w.max_lag) {
      if (!std::isfinite(curve.values[d])) {
        throw ContractError(std::string(what) + ": non-finite curve value");
      }
      out.lags.push_back(lag);
      out.values.push_back(curve.values[d]);
    }
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Solves the 3x3 normal equations (JtJ + mu*diag) step = Jtr in place.
bool solve3(double a[3][3], const double b[3], double out[3]) {
  double m[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
    m[i][3] = b[i];
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (m[pivot][col] == 0.0) return false;
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  for (int i = 0; i < 3; ++i) out[i] = m[i][3] / m[i][i];
  return true;
}

double kww_sse(const WindowPoints& pts, double b, double c, double t0) {
  double sse = 0.0;
  for (std::size_t i = 0; i < pts.lags.size(); ++i) {
    const double r = pts.values[i] - (b + c * std::exp(-2.0 * pts.lags[i] / t0));
    sse += r * r;
  }
  return sse;
}

}  // namespace

KwwFit fit_kww(const G2Curve& curve, const LagWindow& window) {
  WindowPoints pts = select_window(curve, window, "fit_kww");
  const std::size_t n = pts.lags.size();
  if (n < 5) {
    throw ContractError("fit_kww: window holds " + std::to_string(n) +
                        " points, need at least 5");
  }

  // Initialization.
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double b = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) b += pts.values[i];
  b /= static_cast<double>(tail);
  const double c = pts.values.front() - b;
  if (c <= 0.0) {
    throw FitDegenerateError(
        "fit_kww: curve does not decay (initial contrast <= 0)");
  }
  const double e2 = std::exp(-2.0);
  double t0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((pts.values[i] - b) / c < e2) {
      t0 = pts.lags[i];
      break;
    }
  }
  if (t0 <= 0.0) t0 = 0.5 * (pts.lags.back() - pts.lags.front());
  if (t0 <= 0.0) t0 = pts.lags.back() > 0.0 ? pts.lags.back() : 1.0;

  // Damped Gauss-Newton on (B, C, t0).
  double params[3] = {b, c, t0};
  double sse = kww_sse(pts, params[0], params[1], params[2]);
  double mu = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    double jtj[3][3] = {{0}};
    double jtr[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const double t = pts.lags[i];
      const double e = std::exp(-2.0 * t / params[2]);
      const double r = pts.values[i] - (params[0] + params[1] * e);
      const double j[3] = {1.0, e,
                           params[1] * e * 2.0 * t / (params[2] * params[2])};
      for (int p = 0; p < 3; ++p) {
        jtr[p] += j[p] * r;
        for (int q = 0; q < 3; ++q) jtj[p][q] += j[p] * j[q];
      }
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      double damped[3][3];
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          damped[p][q] = jtj[p][q] + (p == q ? mu * (1.0 + jtj[p][p]) : 0.0);
      double step[3];
      if (!solve3(damped, jtr, step)) {
        mu *= 10.0;
        continue;
      }
      const double cand[3] = {params[0] + step[0], params[1] + step[1],
                              params[2] + step[2]};
      if (!(cand[2] > 0.0) || !std::isfinite(cand[2])) {
        mu *= 10.0;
        continue;
      }
      const double cand_sse = kww_sse(pts, cand[0], cand[1], cand[2]);
      if (cand_sse <= sse) {
        double rel = 0.0;
        for (int p = 0; p < 3; ++p) {
          rel = std::max(rel, std::abs(step[p]) /
                                  std::max(1e-30, std::abs(cand[p])));
        }
        for (int p = 0; p < 3; ++p) params[p] = cand[p];
        sse = cand_sse;
        mu = std::max(mu / 3.0, 1e-14);
        stepped = true;
        if (rel < 1e-10) converged = true;
        break;
      }
      mu *= 10.0;
    }
    if (!stepped) {
      // Damping exhausted: no direction improves, treat as a stationary
      // point of the objective.
      converged = true;
    }
  }

  KwwFit fit{params[0], params[1], params[2],
             std::sqrt(sse / static_cast<double>(n))};
  if (!converged) {
    throw FitError("fit_kww: no convergence within 200 iterations", fit);
  }
  return fit;
}

PeakVisibility peak_visibility(const G2Curve& curve,
                               const LagWindow& peak_window,
                               const LagWindow& baseline_window) {
  const bool disjoint = peak_window.max_lag < baseline_window.min_lag ||
                        baseline_window.max_lag < peak_window.min_lag;
  if (!disjoint) {
    throw ContractError("peak_visibility: windows overlap");
  }
  WindowPoints peak = select_window(curve, peak_window, "peak_visibility");
  WindowPoints base = select_window(curve, baseline_window, "peak_visibility");
  if (peak.lags.empty() || base.lags.empty()) {
    throw ContractError("peak_visibility: a window selects no points");
  }

  PeakVisibility out;
  out.peak_value = peak.values.front();
  out.peak_lag = peak.lags.front();
  for (std::size_t i = 1; i < peak.values.size(); ++i) {
    if (peak.values[i] > out.peak_value) {
      out.peak_value = peak.values[i];
      out.peak_lag = peak.lags[i];
    }
  }
  out.baseline_value = median(std::move(base.values));
  out.visibility = out.peak_value - out.baseline_value;
  return out;
}

double ttc_background(const TTCMatrix& g, std::size_t exclusion) {
  const std::size_t n = g.n();
  if (n <= 2 * exclusion) {
    throw ContractError("ttc_background: exclusion band of " +
                        std::to_string(exclusion) + " covers the whole " +
                        std::to_string(n) + "-frame TTC");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      if (lag > exclusion) {
        sum += g.values()(i, j);
        ++count;
      }
    }
  }
  if (count == 0) {
    throw ContractError("ttc_background: no entries outside the band");
  }
  const double mean = sum / static_cast<double>(count);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      if (lag > exclusion) {
        const double d = g.values()(i, j) - mean;
        var += d * d;
      }
    }
  }
  return std::sqrt(var / static_cast<double>(count));
}

bool detectability(double visibility, double background_sigma) {
  if (background_sigma < 0.0) {
    throw ContractError("detectability: background sigma must be >= 0");
  }
  return visibility > 2.0 * background_sigma;
}

SpectrumReport spectrum_report(const EncodingMatrix& enc) {
  SpectrumReport report;
  report.spectrum = enc.spectrum();
  report.suggested_k = suggest_k(enc, 2.0);
  report.degenerate = report.suggested_k == 0;
  return report;
}

VisibilityReport make_visibility_report(const G2Curve& curve,
                                        const TTCMatrix& ttc,
                                        const LagWindow& peak_window,
                                        const LagWindow& baseline_window,
                                        std::size_t exclusion) {
  const PeakVisibility pv = peak_visibility(curve, peak_window, baseline_window);
  const double sigma = ttc_background(ttc, exclusion);
  VisibilityReport report;
  report.peak_lag = pv.peak_lag;
  report.peak_value = pv.peak_value;
  report.baseline_value = pv.baseline_value;
  report.visibility = pv.visibility;
  report.ttc_background_sigma = sigma;
  report.detectable = detectability(pv.visibility, sigma);
  return report;
}

}  // namespace xpcs
