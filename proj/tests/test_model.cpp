#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include "test_helpers.hpp"
#include "xpcsvd/compress.hpp"
#include "xpcsvd/correlate.hpp"
#include "xpcsvd/encoder.hpp"
#include "xpcsvd/io.hpp"
#include "xpcsvd/model.hpp"

using xpcs::Matrix;

TEST_CASE("pixel mask validation") {
  CHECK_THROWS_AS(xpcs::PixelMask(4, {}), xpcs::MaskError);
  CHECK_THROWS_AS(xpcs::PixelMask(4, {0, 4}), xpcs::MaskError);
  CHECK_THROWS_AS(xpcs::PixelMask(4, {2, 1}), xpcs::MaskError);
  CHECK_THROWS_AS(xpcs::PixelMask(4, {1, 1}), xpcs::MaskError);
  CHECK(xpcs::PixelMask(4, {0, 1, 2, 3}).count() == 4);
}

TEST_CASE("frame series validation") {
  CHECK_THROWS_AS(xpcs::FrameSeries(Matrix(1, 2, {1.0, -0.5})),
                  xpcs::ContractError);
  CHECK_THROWS_AS(xpcs::FrameSeries(Matrix(1, 2, {1.0, 2.0}), 0.0),
                  xpcs::ContractError);
}

TEST_CASE("apply_mask identity selection") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(3, 4, 1));
  const xpcs::PixelMask all(4, {0, 1, 2, 3});
  const xpcs::FrameSeries out = xpcs::apply_mask(frames, all);
  CHECK(out.intensities == frames.intensities);
  CHECK(out.mask.has_value());
}

TEST_CASE("apply_mask column picking") {
  const Matrix m(2, 4, {0, 1, 2, 3, 4, 5, 6, 7});
  const xpcs::FrameSeries out =
      xpcs::apply_mask(xpcs::FrameSeries(m), xpcs::PixelMask(4, {1, 3}));
  CHECK(out.n_pixels() == 2);
  CHECK(out.intensities == Matrix(2, 2, {1, 3, 5, 7}));
}

TEST_CASE("apply_mask matches direct indexing on a synthetic annulus") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(10, 100, 2));
  std::vector<std::size_t> ring;
  for (std::size_t p = 11; p < 90; p += 3) ring.push_back(p);
  const xpcs::PixelMask mask(100, ring);
  const xpcs::FrameSeries out = xpcs::apply_mask(frames, mask);
  REQUIRE(out.n_pixels() == ring.size());
  for (std::size_t i = 0; i < out.n_frames(); ++i)
    for (std::size_t j = 0; j < ring.size(); ++j)
      CHECK(out.intensities(i, j) == frames.intensities(i, ring[j]));
}

TEST_CASE("apply_mask errors") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(2, 4, 3));
  CHECK_THROWS_AS(xpcs::apply_mask(frames, xpcs::PixelMask(5, {0, 1})),
                  xpcs::MaskError);
  const xpcs::FrameSeries masked =
      xpcs::apply_mask(frames, xpcs::PixelMask(4, {0, 1}));
  CHECK_THROWS_AS(xpcs::apply_mask(masked, xpcs::PixelMask(2, {0})),
                  xpcs::MaskError);
}

TEST_CASE("mask and complement together cover all columns exactly once") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(4, 12, 4));
  const std::vector<std::size_t> picked = {1, 4, 6, 11};
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < 12; ++p) {
    if (std::find(picked.begin(), picked.end(), p) == picked.end()) {
      rest.push_back(p);
    }
  }
  const auto a = xpcs::apply_mask(frames, xpcs::PixelMask(12, picked));
  const auto b = xpcs::apply_mask(frames, xpcs::PixelMask(12, rest));
  std::vector<double> seen;
  for (std::size_t j = 0; j < a.n_pixels(); ++j)
    seen.push_back(a.intensities(0, j));
  for (std::size_t j = 0; j < b.n_pixels(); ++j)
    seen.push_back(b.intensities(0, j));
  std::vector<double> expect(frames.intensities.row(0).begin(),
                             frames.intensities.row(0).end());
  std::sort(seen.begin(), seen.end());
  std::sort(expect.begin(), expect.end());
  CHECK(seen == expect);
}

TEST_CASE("content hash determinism and sensitivity") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(6, 16, 5));
  const xpcs::EncodingMatrix enc = xpcs::build_offline(frames);
  CHECK(xpcs::content_hash(enc) == xpcs::content_hash(enc));
  CHECK(xpcs::content_hash(enc).size() == 16);

  const xpcs::EncodingMatrix trunc = xpcs::truncate(enc, enc.k() - 1);
  CHECK(xpcs::content_hash(enc) != xpcs::content_hash(trunc));
}

TEST_CASE("content hash survives the file round trip") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(5, 12, 6));
  const xpcs::EncodingMatrix enc = xpcs::build_offline(frames);
  const std::string path = test::scratch_path("hash_roundtrip.xenc");
  xpcs::io::write_encoder(path, enc);
  const xpcs::EncodingMatrix back = xpcs::io::read_encoder(path);
  CHECK(xpcs::content_hash(back) == xpcs::content_hash(enc));
}

TEST_CASE("compressed series append and snapshot") {
  xpcs::CompressedSeries store(2, 42);
  CHECK(store.n_frames() == 0);
  store.append(std::vector<double>{0.5, 0.5}, 3.0);
  store.append(std::vector<double>{0.1, 0.2}, 4.0);
  const auto snap = store.snapshot();
  CHECK(snap.n_frames() == 2);
  CHECK(snap.norms == std::vector<double>{3.0, 4.0});
  CHECK(snap.coefficients == std::vector<double>{0.5, 0.5, 0.1, 0.2});
}

TEST_CASE("compressed series rejects bad rows") {
  xpcs::CompressedSeries store(2, 0);
  CHECK_THROWS_AS(store.append(std::vector<double>{1.0}, 1.0),
                  xpcs::ShapeError);
  CHECK_THROWS_AS(store.append(std::vector<double>{1.0, 1.0}, 1.0),
                  xpcs::ContractError);  // row norm sqrt(2) > 1
  CHECK_THROWS_AS(store.append(std::vector<double>{0.5, 0.5}, 0.0),
                  xpcs::ContractError);
}

TEST_CASE("concurrent appends and snapshots keep consistent prefixes") {
  xpcs::CompressedSeries store(1, 0);
  std::thread writer([&] {
    for (int i = 0; i < 2000; ++i) {
      store.append(std::vector<double>{0.5}, 1.0 + i);
    }
  });
  bool prefix_ok = true;
  for (int r = 0; r < 200; ++r) {
    const auto snap = store.snapshot();
    if (snap.coefficients.size() != snap.norms.size() * snap.k) {
      prefix_ok = false;
      break;
    }
    for (std::size_t i = 0; i < snap.n_frames(); ++i) {
      if (snap.norms[i] != 1.0 + static_cast<double>(i)) prefix_ok = false;
    }
  }
  writer.join();
  CHECK(prefix_ok);
  CHECK(store.n_frames() == 2000);
}

TEST_CASE("ttc matrix validation") {
  CHECK_THROWS_AS(xpcs::TTCMatrix(Matrix(2, 3), false), xpcs::ShapeError);
  CHECK_THROWS_AS(xpcs::TTCMatrix(Matrix(2, 2, {1, 0.5, 0.4, 1}), false),
                  xpcs::ContractError);  // asymmetric
  CHECK_THROWS_AS(xpcs::TTCMatrix(Matrix(2, 2, {1, 1.5, 1.5, 1}), false),
                  xpcs::ContractError);  // out of bounds
  CHECK_THROWS_AS(xpcs::TTCMatrix(Matrix(2, 2, {0.5, 0.1, 0.1, 1}), true),
                  xpcs::ContractError);  // lossless needs unit diagonal
  CHECK_NOTHROW(xpcs::TTCMatrix(Matrix(2, 2, {0.5, -0.1, -0.1, 1}), false));
}

TEST_CASE("projection contraction holds for compressed rows") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(12, 40, 7));
  const xpcs::EncodingMatrix enc =
      xpcs::truncate(xpcs::build_offline(frames), 5);
  const auto snap = xpcs::compress_series(frames, enc).snapshot();
  for (std::size_t i = 0; i < snap.n_frames(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < snap.k; ++j) {
      const double c = snap.coefficients[i * snap.k + j];
      sq += c * c;
    }
    CHECK(std::sqrt(sq) <= 1.0 + 1e-10);
  }
}

TEST_CASE("ttc entries obey the Cauchy-Schwarz bound") {
  const xpcs::FrameSeries frames(test::random_positive_matrix(10, 32, 8));
  const xpcs::TTCMatrix g = xpcs::ttc_raw(frames);
  for (double v : g.values().data()) {
    CHECK(v <= 1.0 + 1e-10);
    CHECK(v >= -1.0 - 1e-10);
  }
}
