#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "xpcsvd/analysis.hpp"
#include "xpcsvd/compress.hpp"
#include "xpcsvd/correlate.hpp"
#include "xpcsvd/encoder.hpp"
#include "xpcsvd/synth.hpp"

using namespace xpcs;

namespace {

double orthonormality_dev(const EncodingMatrix& enc) {
  const Matrix vtv = gram_of_columns(enc.v());
  double worst = 0.0;
  for (std::size_t i = 0; i < vtv.rows(); ++i)
    for (std::size_t j = 0; j < vtv.cols(); ++j)
      worst = std::max(worst,
                       std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST_CASE("build_offline on copies of one frame has rank 1") {
  Matrix m(3, 8);
  const Matrix one = test::random_positive_matrix(1, 8, 1);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 0; p < 8; ++p) m(t, p) = one(0, p);
  const EncodingMatrix enc = build_offline(FrameSeries(std::move(m)));
  REQUIRE(enc.k() == 1);
  // The single column is the normalized frame; sign-fixing makes it
  // positive, and the frame is positive already.
  const double norm = std::sqrt(dot(one.row(0), one.row(0)));
  for (std::size_t p = 0; p < 8; ++p) {
    CHECK(enc.v()(p, 0) == doctest::Approx(one(0, p) / norm).epsilon(1e-12));
  }
}

TEST_CASE("build_offline full-rank random series") {
  const FrameSeries frames(test::random_positive_matrix(16, 64, 2));
  const EncodingMatrix enc = build_offline(frames);
  CHECK(enc.k() == 16);
  CHECK(orthonormality_dev(enc) <= 1e-10);
  CHECK(enc.spectrum().size() == 16);
}

TEST_CASE("build_offline synthetic oscillatory spectrum and reconstruction") {
  const FrameSeries frames = synth::gen_oscillatory(128, 2048, 40, 0.5, 0.01, 7);
  const EncodingMatrix enc = build_offline(frames);
  for (std::size_t i = 0; i + 1 < enc.spectrum().size(); ++i) {
    CHECK(enc.spectrum()[i] > enc.spectrum()[i + 1]);
  }
  const CompressedSeries y = compress_series(frames, enc);
  const Matrix xn = row_normalize(frames.intensities).first;
  const Matrix xd = decompress(y, enc);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xn.data().size(); ++i) {
    const double d = xn.data()[i] - xd.data()[i];
    num += d * d;
    den += xn.data()[i] * xn.data()[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("build_offline propagates zero-frame errors") {
  Matrix m(3, 4);
  m(0, 0) = 1.0;
  m(2, 2) = 1.0;  // frame 1 all zero
  CHECK_THROWS_AS(build_offline(FrameSeries(std::move(m))),
                  NormalizationError);
}

TEST_CASE("build_online flat reference has rank 1") {
  GrayImage flat;
  flat.width = 16;
  flat.height = 16;
  flat.pixels.assign(256, 9.0);
  CHECK_THROWS_AS(build_online(flat, 10, 8, 8, 1, 2), RankError);
  try {
    build_online(flat, 10, 8, 8, 1, 2);
  } catch (const RankError& e) {
    CHECK(e.achievable_rank() == 1);
  }
  const EncodingMatrix enc = build_online(flat, 10, 8, 8, 1, 1);
  CHECK(enc.k() == 1);
}

TEST_CASE("build_online same seed gives bitwise identical encoders") {
  const GrayImage ref = synth::make_texture(64, 64, 3);
  const EncodingMatrix a = build_online(ref, 50, 32, 32, 5, 10);
  const EncodingMatrix b = build_online(ref, 50, 32, 32, 5, 10);
  CHECK(a.v() == b.v());
  CHECK(a.spectrum() == b.spectrum());
  CHECK(a.mode() == EncoderMode::kOnlineUnrelated);
}

TEST_CASE("build_online projection of an unrelated frame is contractive") {
  const GrayImage ref = synth::make_texture(256, 256, 4);
  const EncodingMatrix enc = build_online(ref, 500, 16, 16, 6, 100);
  CHECK(orthonormality_dev(enc) <= 1e-10);

  const Matrix frame = test::random_positive_matrix(1, 256, 7);
  const auto [coeffs, norm] = compress_frame(frame.row(0), enc);
  double sq = 0.0;
  for (double c : coeffs) sq += c * c;
  CHECK(std::sqrt(sq) < 1.0);
  CHECK(std::sqrt(sq) > 0.0);
}

TEST_CASE("build_online validates r_samples against k") {
  const GrayImage ref = synth::make_texture(16, 16, 8);
  CHECK_THROWS_AS(build_online(ref, 5, 8, 8, 1, 6), ContractError);
}

TEST_CASE("build_online_from_frames equals build_offline at full rank") {
  const FrameSeries frames(test::random_positive_matrix(8, 32, 9));
  const EncodingMatrix off = build_offline(frames);
  const EncodingMatrix rel = build_online_from_frames(frames, off.k());
  CHECK(rel.v() == off.v());
  CHECK(rel.mode() == EncoderMode::kOnlineRelated);
}

TEST_CASE("build_online_from_frames k=1 compresses rows to scalars") {
  const FrameSeries frames(test::random_positive_matrix(8, 32, 10));
  const EncodingMatrix enc = build_online_from_frames(frames, 1);
  CHECK(enc.k() == 1);
  const CompressedSeries y = compress_series(frames, enc);
  CHECK(y.snapshot().coefficients.size() == 8);
  CHECK_THROWS_AS(build_online_from_frames(frames, 100), RankError);
}

TEST_CASE("online-related encoder from the first half is usable on the second") {
  const FrameSeries all = synth::gen_oscillatory(64, 512, 16, 0.5, 0.01, 11);
  Matrix first(32, 512), second(32, 512);
  for (std::size_t t = 0; t < 32; ++t)
    for (std::size_t p = 0; p < 512; ++p) {
      first(t, p) = all.intensities(t, p);
      second(t, p) = all.intensities(t + 32, p);
    }
  const FrameSeries prior(std::move(first));
  const FrameSeries target(std::move(second));

  const std::size_t k = 8;
  const EncodingMatrix related = build_online_from_frames(prior, k);
  const EncodingMatrix offline = truncate(build_offline(target), k);

  const G2Curve g2_rel =
      g2_from_ttc(ttc_compressed(compress_series(target, related)), 1.0);
  const G2Curve g2_off =
      g2_from_ttc(ttc_compressed(compress_series(target, offline)), 1.0);
  const PeakVisibility rel = peak_visibility(g2_rel, {12, 20}, {4, 10});
  const PeakVisibility off = peak_visibility(g2_off, {12, 20}, {4, 10});
  CHECK(rel.visibility > 0.0);
  CHECK(rel.visibility >= off.visibility / 2.0);
  CHECK(rel.visibility <= off.visibility * 2.0);
}

TEST_CASE("truncate keeps prefixes and validates k") {
  const FrameSeries frames(test::random_positive_matrix(10, 40, 12));
  const EncodingMatrix enc = build_offline(frames);
  CHECK(truncate(enc, enc.k()).v() == enc.v());

  const EncodingMatrix one = truncate(enc, 1);
  CHECK(one.k() == 1);
  CHECK(std::abs(std::sqrt(dot(one.v().data(), one.v().data())) - 1.0) <= 1e-12);
  CHECK(one.spectrum() == enc.spectrum());

  const EncodingMatrix a = truncate(truncate(enc, 7), 3);
  const EncodingMatrix b = truncate(enc, 3);
  CHECK(a.v() == b.v());

  // Prefix property: truncate(enc, k1) columns are the first columns of
  // truncate(enc, k2) for k1 <= k2.
  const EncodingMatrix k2 = truncate(enc, 5);
  const EncodingMatrix k1 = truncate(enc, 2);
  for (std::size_t i = 0; i < k1.n_pixels(); ++i)
    for (std::size_t j = 0; j < k1.k(); ++j)
      CHECK(k1.v()(i, j) == k2.v()(i, j));

  CHECK_THROWS_AS(truncate(enc, 0), ContractError);
  CHECK_THROWS_AS(truncate(enc, enc.k() + 1), ContractError);
}

TEST_CASE("suggest_k counts values above factor times the minimum") {
  const Matrix v(5, 1, {1, 0, 0, 0, 0});
  const EncodingMatrix flat(v, {1.0, 1.0, 1.0}, EncoderMode::kOffline);
  CHECK(suggest_k(flat) == 0);

  const EncodingMatrix steps(v, {10, 5, 3, 1, 1}, EncoderMode::kOffline);
  CHECK(suggest_k(steps) == 3);
  CHECK_THROWS_AS(suggest_k(steps, 1.0), ContractError);
}

TEST_CASE("suggest_k is monotone non-increasing in the factor") {
  const FrameSeries frames = synth::gen_oscillatory(32, 512, 8, 0.5, 0.02, 13);
  const EncodingMatrix enc = build_offline(frames);
  std::size_t prev = enc.spectrum().size();
  for (double factor : {1.5, 2.0, 3.0, 5.0, 10.0}) {
    const std::size_t k = suggest_k(enc, factor);
    CHECK(k <= prev);
    prev = k;
  }
}

TEST_CASE("suggested k keeps visibility within 10% of lossless") {
  const FrameSeries frames =
      synth::gen_oscillatory(128, 2048, 40, 0.5, 0.01, 14);
  const EncodingMatrix enc = build_offline(frames);
  const std::size_t k = suggest_k(enc, 2.0);
  REQUIRE(k >= 1);
  CHECK(k < frames.n_frames() / 2);  // small relative to N

  const G2Curve lossless =
      g2_from_ttc(ttc_compressed(compress_series(frames, enc)), 1.0);
  const G2Curve lossy = g2_from_ttc(
      ttc_compressed(compress_series(frames, truncate(enc, k))), 1.0);
  const LagWindow peak{30, 50}, base{5, 15};
  const double vis_full = peak_visibility(lossless, peak, base).visibility;
  const double vis_k = peak_visibility(lossy, peak, base).visibility;
  CHECK(std::abs(vis_k - vis_full) <= 0.1 * std::abs(vis_full));
}
