// Acceptance suite: end-to-end checks of the homomorphic-compression
// pipeline at fixed tolerances, one PASS/FAIL line each. Exit code is the
// number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xpcsvd/analysis.hpp"
#include "xpcsvd/bench.hpp"
#include "xpcsvd/compress.hpp"
#include "xpcsvd/correlate.hpp"
#include "xpcsvd/encoder.hpp"
#include "xpcsvd/io.hpp"
#include "xpcsvd/rng.hpp"
#include "xpcsvd/synth.hpp"

using namespace xpcs;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool pass,
            const std::string& detail) {
  std::printf("criterion %2d %-34s %s  %s\n", criterion, name,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

FrameSeries half_series(const FrameSeries& all, bool second) {
  const std::size_t half = all.n_frames() / 2;
  const std::size_t base = second ? half : 0;
  Matrix m(half, all.n_pixels());
  for (std::size_t t = 0; t < half; ++t)
    for (std::size_t p = 0; p < all.n_pixels(); ++p)
      m(t, p) = all.intensities(t + base, p);
  return FrameSeries(std::move(m), all.frame_period);
}

// Echo-type oscillatory speckle for the detectability sweep: the sample
// configuration revisits itself every `period` frames, so the TTC shows
// sharp ridges at lag multiples of the period on a flat decorrelated
// background. The smooth two-field mixing of gen_oscillatory keeps the
// whole TTC highly correlated, which makes its standard deviation
// comparable to any g2 peak and the 2-sigma verdict unreachable by
// construction; the sharp-recurrence variant is the regime where the
// verdict is informative.
FrameSeries gen_echo_speckle(std::size_t n, std::size_t m, std::size_t period,
                             double noise, std::uint64_t seed) {
  const CounterRng rng(seed);
  const CounterRng fields = rng.substream(6);
  const CounterRng eps = rng.substream(3);
  Matrix x(n, m);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t phase = t % period;
    auto row = x.row(t);
    for (std::size_t p = 0; p < m; ++p) {
      double v = fields.exponential(phase * m + p);
      if (noise > 0.0) v += noise * eps.normal(t * m + p);
      row[p] = v < 0.0 ? 0.0 : v;
    }
  }
  return FrameSeries(std::move(x), 1.0);
}

// ---- criteria 1, 2, 4 share the same oscillatory series -------------------

void criteria_1_2_4(const std::function<void()>& criterion_3_hook) {
  const auto start = std::chrono::steady_clock::now();
  const FrameSeries frames =
      synth::gen_oscillatory(128, 4096, 40.0, 0.5, 0.01, 7);
  const EncodingMatrix enc = build_offline(frames);

  const TTCMatrix g_raw = ttc_raw(frames);
  const TTCMatrix g_cmp = ttc_compressed(compress_series(frames, enc));
  const double ttc_dev = max_abs_diff(g_raw.values(), g_cmp.values());

  const G2Curve g2_raw = g2_from_ttc(g_raw, 1.0);
  const G2Curve g2_cmp = g2_from_ttc(g_cmp, 1.0);
  double g2_dev = 0.0;
  for (std::size_t d = 0; d < g2_raw.values.size(); ++d)
    g2_dev = std::max(g2_dev, std::abs(g2_raw.values[d] - g2_cmp.values[d]));

  const double elapsed = seconds_since(start);
  report(1, "homomorphic lossless identity",
         ttc_dev <= 1e-10 && g2_dev <= 1e-10 && elapsed < 10.0,
         fmt("max|G-G~|=%.2e  max|g2-g2~|=%.2e  %.1fs", ttc_dev, g2_dev,
             elapsed));

  {
    const Matrix xn = row_normalize(frames.intensities).first;
    const Matrix xd = decompress(compress_series(frames, enc), enc);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xn.data().size(); ++i) {
      const double d = xn.data()[i] - xd.data()[i];
      num += d * d;
      den += xn.data()[i] * xn.data()[i];
    }
    const double rel = std::sqrt(num / den);
    report(2, "lossless decompression", rel <= 1e-10, fmt("rel=%.2e", rel));
  }

  criterion_3_hook();

  {
    const std::size_t rank = enc.k();
    const LagWindow peak{30, 50}, base{8, 24};
    const double vis_lossless =
        peak_visibility(g2_cmp, peak, base).visibility;

    bool monotone = true;
    double prev = 1e300;
    double err_at_rank = -1.0;
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k < rank; k *= 2) ks.push_back(k);
    ks.push_back(rank);
    for (std::size_t k : ks) {
      const EncodingMatrix enc_k = truncate(enc, k);
      const TTCMatrix g_k = ttc_compressed(compress_series(frames, enc_k));
      double err = 0.0, den = 0.0;
      for (std::size_t i = 0; i < g_raw.values().data().size(); ++i) {
        const double d = g_raw.values().data()[i] - g_k.values().data()[i];
        err += d * d;
        den += g_raw.values().data()[i] * g_raw.values().data()[i];
      }
      err = std::sqrt(err);
      if (err > prev + 1e-12) monotone = false;
      prev = err;
      if (k == rank) err_at_rank = err / std::sqrt(den);
    }
    const EncodingMatrix enc_rank = truncate(enc, rank);
    const G2Curve g2_rank = g2_from_ttc(
        ttc_compressed(compress_series(frames, enc_rank)), 1.0);
    const double vis_rank = peak_visibility(g2_rank, peak, base).visibility;
    const double vis_gap =
        std::abs(vis_rank - vis_lossless) / std::abs(vis_lossless);
    report(4, "lossy monotonicity and convergence",
           monotone && err_at_rank <= 1e-10 && vis_gap <= 0.01,
           fmt("monotone=%d  rel_err@rank=%.2e  vis_gap=%.2e%%", monotone,
               err_at_rank, 100.0 * vis_gap));
  }
}

// ---- criterion 3: tiny-scale oracle equivalence ---------------------------

void criterion_3() {
  const CounterRng rng = CounterRng(99).substream(98);
  std::vector<double> data(8 * 32);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = rng.exponential(i);
  const FrameSeries frames{Matrix(8, 32, std::move(data))};

  const EncodingMatrix enc = build_offline(frames);
  const TTCMatrix g = ttc_compressed(compress_series(frames, enc));

  double worst = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      double dij = 0, ni = 0, nj = 0;
      for (std::size_t p = 0; p < 32; ++p) {
        dij += frames.intensities(i, p) * frames.intensities(j, p);
        ni += frames.intensities(i, p) * frames.intensities(i, p);
        nj += frames.intensities(j, p) * frames.intensities(j, p);
      }
      const double oracle = dij / (std::sqrt(ni) * std::sqrt(nj));
      worst = std::max(worst, std::abs(g.values()(i, j) - oracle));
    }
  }
  report(3, "tiny-scale oracle equivalence", worst <= 1e-12,
         fmt("max|G~-oracle|=%.2e", worst));
}

// ---- criteria 5 and 6: compression ratios and speedups --------------------

void criteria_5_6() {
  const auto start = std::chrono::steady_clock::now();
  const std::string scratch =
      (std::filesystem::temp_directory_path() / "xpcsvd_acceptance").string();

  const std::vector<bench::BenchConfig> grid = {{256, 65536, 16},
                                                {256, 65536, 64}};
  const bench::BenchReport rep = bench::run_bench(grid, 1, 7, scratch);

  bool cr_ok = true;
  std::string detail;
  for (const auto& r : rep.results) {
    const double off_dev =
        std::abs(r.cr_offline_measured - r.cr_offline_formula) /
        r.cr_offline_formula;
    const double on_dev = std::abs(r.cr_online_measured - r.cr_online_formula) /
                          r.cr_online_formula;
    if (off_dev > 0.05 || on_dev > 0.05) cr_ok = false;
    detail += fmt("K=%zu off %.4g/%.4g (%.2f%%) on %.4g/%.4g (%.2f%%)  ",
                  r.k, r.cr_offline_measured, r.cr_offline_formula,
                  100 * off_dev, r.cr_online_measured, r.cr_online_formula,
                  100 * on_dev);
  }
  if (!cr_ok) {
    // Store records carry a per-frame norm next to the K coefficients, so
    // the online file is 32 + 8N(K+1) bytes and its ratio sits (K+1)/K
    // below M/K; at K=16 that overhead alone is 6.25%.
    detail += "[store record = norm + K coeffs -> (K+1)/K overhead]";
  }
  report(5, "compression-ratio arithmetic", cr_ok, detail);

  // Speedup from the K=64 entry. Octave scaling of the raw TTC is measured
  // on both sizes back to back, median of three interleaved runs each.
  const double speedup = rep.results[1].speedup;
  {
    const FrameSeries small =
        synth::gen_oscillatory(256, 65536, 40.0, 0.5, 0.01, 7);
    const FrameSeries big =
        synth::gen_oscillatory(256, 131072, 40.0, 0.5, 0.01, 7);
    std::vector<double> t_small, t_big;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      auto t0 = std::chrono::steady_clock::now();
      ttc_raw(small);
      t_small.push_back(seconds_since(t0));
      t0 = std::chrono::steady_clock::now();
      ttc_raw(big);
      t_big.push_back(seconds_since(t0));
    }
    std::sort(t_small.begin(), t_small.end());
    std::sort(t_big.begin(), t_big.end());
    const double ratio = t_big[1] / t_small[1];
    const double elapsed = seconds_since(start);
    report(6, "desk-scale speedup and scaling",
           speedup >= 100.0 && ratio >= 1.4 && ratio <= 2.6 && elapsed < 60.0,
           fmt("speedup=%.0fx  octave raw-time ratio=%.2f  %.1fs", speedup,
               ratio, elapsed));
  }
}

// ---- criterion 7: KWW recovery --------------------------------------------

void criterion_7() {
  const FrameSeries frames = synth::gen_relaxation(512, 2048, 0.98, 2);
  const G2Curve g2 = g2_from_ttc(ttc_raw(frames), 1.0);
  const KwwFit fit = fit_kww(g2, {0.0, 300.0});
  const double expect = -1.0 / std::log(0.98);
  const double rel = std::abs(fit.relaxation_time - expect) / expect;

  // Noiseless self-fit.
  G2Curve model;
  for (std::size_t d = 0; d < 200; ++d) {
    model.lags.push_back(double(d));
    model.values.push_back(0.5 + 0.4 * std::exp(-2.0 * double(d) / 60.0));
    model.counts.push_back(200 - d);
  }
  const KwwFit self = fit_kww(model, {0.0, 199.0});
  const double self_dev = std::max(
      {std::abs(self.baseline - 0.5) / 0.5, std::abs(self.contrast - 0.4) / 0.4,
       std::abs(self.relaxation_time - 60.0) / 60.0});

  report(7, "KWW relaxation-time recovery", rel <= 0.15 && self_dev <= 1e-6,
         fmt("t0=%.2f vs %.2f (%.1f%%)  self-fit dev=%.1e", fit.relaxation_time,
             expect, 100 * rel, self_dev));
}

// ---- criterion 8: online detectability sweep ------------------------------

void criterion_8() {
  const FrameSeries all = gen_echo_speckle(256, 4096, 40, 0.05, 11);
  const FrameSeries prior = half_series(all, false);
  const FrameSeries target = half_series(all, true);

  const GrayImage texture = synth::make_texture(256, 256, 21);
  const EncodingMatrix related_full = build_online_from_frames(prior, 100);
  const EncodingMatrix unrelated_full =
      build_online(texture, 500, 64, 64, 13, 100);

  const LagWindow peak{30, 50}, base{55, 75};
  const auto min_detectable_k =
      [&](const EncodingMatrix& full) -> std::optional<std::size_t> {
    for (std::size_t k :
         {1u, 2u, 4u, 8u, 12u, 16u, 24u, 32u, 48u, 64u, 80u, 100u}) {
      const EncodingMatrix enc_k = truncate(full, k);
      const TTCMatrix g = ttc_compressed(compress_series(target, enc_k));
      const VisibilityReport rep =
          make_visibility_report(g2_from_ttc(g, 1.0), g, peak, base, 0);
      if (rep.detectable) return k;
    }
    return std::nullopt;
  };

  const auto related_k = min_detectable_k(related_full);
  const auto unrelated_k = min_detectable_k(unrelated_full);

  const bool related_ok = related_k.has_value() && *related_k <= 100;
  const bool ordering_ok =
      !unrelated_k.has_value() || (related_k.has_value() && *unrelated_k >= *related_k);
  report(8, "online detectability ordering", related_ok && ordering_ok,
         fmt("related K*=%s  unrelated K*=%s",
             related_k ? std::to_string(*related_k).c_str() : "none<=100",
             unrelated_k ? std::to_string(*unrelated_k).c_str() : "none<=100"));
}

// ---- criterion 9: streaming equivalence -----------------------------------

void criterion_9() {
  const FrameSeries frames =
      synth::gen_oscillatory(200, 1024, 40.0, 0.5, 0.01, 5);
  const EncodingMatrix enc = truncate(build_offline(frames), 16);

  CompressedSeries store(enc.k(), content_hash_u64(enc));
  std::optional<TTCMatrix> g;
  for (std::size_t t = 0; t < frames.n_frames(); ++t) {
    const auto [coeffs, norm] = compress_frame(frames.intensities.row(t), enc);
    if (t >= 2) {
      g = ttc_extend(*g, store, coeffs);
    }
    store.append(coeffs, norm);
    if (t == 1) g = ttc_compressed(store);
  }

  const CompressedSeries batch = compress_series(frames, enc);
  const TTCMatrix g_batch = ttc_compressed(batch);
  const bool coeffs_equal =
      store.snapshot().coefficients == batch.snapshot().coefficients;
  const bool ttc_equal = g->values() == g_batch.values();
  report(9, "streaming equivalence (bitwise)", coeffs_equal && ttc_equal,
         fmt("coeffs bitwise=%d  ttc bitwise=%d over %zu frames", coeffs_equal,
             ttc_equal, frames.n_frames()));
}

// ---- criterion 10: invariant spot-checks ----------------------------------

void criterion_10() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string what;

  const auto check = [&](bool cond, const char* label) {
    if (!cond && ok) {
      ok = false;
      what = label;
    }
  };

  // RNG determinism.
  check(CounterRng(5).bits(17) == CounterRng(5).bits(17), "rng determinism");

  // Orthonormality and PSD on a fresh series.
  const FrameSeries frames = synth::gen_oscillatory(48, 512, 12, 0.5, 0.02, 3);
  const EncodingMatrix enc = build_offline(frames);
  const Matrix vtv = gram_of_columns(enc.v());
  double dev = 0.0;
  for (std::size_t i = 0; i < vtv.rows(); ++i)
    for (std::size_t j = 0; j < vtv.cols(); ++j)
      dev = std::max(dev, std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)));
  check(dev <= 1e-10, "V^T V = I");

  const EncodingMatrix enc8 = truncate(enc, 8);
  const CompressedSeries y = compress_series(frames, enc8);
  const TTCMatrix g = ttc_compressed(y);
  const auto eig = sym_eig(g.values());
  check(eig.eigenvalues.back() >= -1e-10 * eig.eigenvalues.front(),
        "G~ positive semidefinite");
  for (std::size_t i = 0; i < g.n(); ++i) {
    check(g.values()(i, i) <= 1.0 + 1e-10, "diag(G~) <= 1");
  }

  const auto snap = y.snapshot();
  for (std::size_t i = 0; i < snap.n_frames(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < snap.k; ++j) {
      const double c = snap.coefficients[i * snap.k + j];
      sq += c * c;
    }
    check(sq <= (1.0 + 1e-10) * (1.0 + 1e-10), "projection contraction");
  }

  // Mask algebra.
  const PixelMask mask(512, {1, 5, 100, 511});
  const FrameSeries masked = apply_mask(frames, mask);
  bool mask_ok = masked.n_pixels() == 4;
  for (std::size_t t = 0; t < frames.n_frames() && mask_ok; ++t)
    for (std::size_t j = 0; j < 4; ++j)
      if (masked.intensities(t, j) !=
          frames.intensities(t, mask.indices[j])) {
        mask_ok = false;
      }
  check(mask_ok, "mask algebra");

  // Format round trips.
  const std::string dir =
      (std::filesystem::temp_directory_path() / "xpcsvd_acceptance").string();
  std::filesystem::create_directories(dir);
  io::write_frames(dir + "/inv.xfs", frames);
  check(io::read_frames(dir + "/inv.xfs").intensities == frames.intensities,
        "frames round trip");
  io::write_encoder(dir + "/inv.xenc", enc8);
  check(io::read_encoder(dir + "/inv.xenc").v() == enc8.v(),
        "encoder round trip");
  io::write_compressed(dir + "/inv.xcmp", y);
  check(io::read_compressed(dir + "/inv.xcmp").snapshot().coefficients ==
            snap.coefficients,
        "store round trip");
  io::write_mask(dir + "/inv.xmsk", mask);
  check(io::read_mask(dir + "/inv.xmsk").indices == mask.indices,
        "mask round trip");

  const double elapsed = seconds_since(start);
  report(10, "invariant suite", ok && elapsed < 120.0,
         ok ? fmt("all invariants hold  %.1fs", elapsed)
            : fmt("first failure: %s", what.c_str()));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criteria_1_2_4(criterion_3);
  criteria_5_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria failed; total %.1fs\n", failures,
              seconds_since(start));
  return failures;
}
