#include "xpcsvd/synth.hpp"

#include <cmath>
#include <string>

#include "xpcsvd/rng.hpp"

namespace xpcs::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
  if (!ok) throw ContractError(msg);
}

}  // namespace

FrameSeries gen_oscillatory(std::size_t n, std::size_t m, double period_frames,
                            double contrast, double noise, std::uint64_t seed,
                            double frame_period) {
  require(n >= 2 && m >= 2, "gen_oscillatory: need n >= 2 and m >= 2");
  require(period_frames >= 2.0, "gen_oscillatory: period_frames must be >= 2");
  require(contrast >= 0.0 && contrast <= 1.0,
          "gen_oscillatory: contrast must be in [0, 1]");
  require(noise >= 0.0, "gen_oscillatory: noise must be >= 0");

  const CounterRng rng(seed);
  const CounterRng field_a = rng.substream(1);
  const CounterRng field_b = rng.substream(2);
  const CounterRng eps = rng.substream(3);

  std::vector<double> a(m), b(m);
  for (std::size_t p = 0; p < m; ++p) {
    a[p] = field_a.exponential(p);
    b[p] = field_b.exponential(p);
  }

  Matrix x(n, m);
  for (std::size_t t = 0; t < n; ++t) {
    const double phase = std::sin(kPi * static_cast<double>(t) / period_frames);
    const double w = contrast * phase * phase;
    auto row = x.row(t);
    for (std::size_t p = 0; p < m; ++p) {
      double v = (1.0 - w) * a[p] + w * b[p];
      if (noise > 0.0) v += noise * eps.normal(t * m + p);
      row[p] = v < 0.0 ? 0.0 : v;
    }
  }
  return FrameSeries(std::move(x), frame_period);
}

FrameSeries gen_relaxation(std::size_t n, std::size_t m, double rho,
                           std::uint64_t seed, double frame_period) {
  require(n >= 2 && m >= 2, "gen_relaxation: need n >= 2 and m >= 2");
  require(rho > 0.0 && rho < 1.0, "gen_relaxation: rho must be in (0, 1)");

  const CounterRng rng(seed);
  const CounterRng base_stream = rng.substream(1);
  const CounterRng re_stream = rng.substream(2);
  const CounterRng im_stream = rng.substream(3);

  std::vector<double> base(m);
  for (std::size_t p = 0; p < m; ++p) base[p] = 1.0 + base_stream.uniform(p);

  // Stationary AR(1) chains for the real and imaginary field components.
  const double innovation = std::sqrt(1.0 - rho * rho);
  std::vector<double> re(m), im(m);
  for (std::size_t p = 0; p < m; ++p) {
    re[p] = re_stream.normal(p);
    im[p] = im_stream.normal(p);
  }

  Matrix x(n, m);
  for (std::size_t t = 0; t < n; ++t) {
    auto row = x.row(t);
    for (std::size_t p = 0; p < m; ++p) {
      row[p] = base[p] * 0.5 * (re[p] * re[p] + im[p] * im[p]);
    }
    if (t + 1 < n) {
      const std::uint64_t step = (t + 1) * m;
      for (std::size_t p = 0; p < m; ++p) {
        re[p] = rho * re[p] + innovation * re_stream.normal(step + p);
        im[p] = rho * im[p] + innovation * im_stream.normal(step + p);
      }
    }
  }
  return FrameSeries(std::move(x), frame_period);
}

FrameSeries gen_shifted_corpus(const GrayImage& reference,
                               std::size_t r_samples, std::size_t frame_h,
                               std::size_t frame_w, std::uint64_t seed) {
  require(r_samples >= 1, "gen_shifted_corpus: need at least one sample");
  require(frame_h >= 1 && frame_w >= 1, "gen_shifted_corpus: empty frame shape");
  if (reference.height < frame_h || reference.width < frame_w) {
    throw ShapeError("reference image " + std::to_string(reference.width) +
                     "x" + std::to_string(reference.height) +
                     " smaller than frame " + std::to_string(frame_w) + "x" +
                     std::to_string(frame_h));
  }

  const CounterRng shifts = CounterRng(seed).substream(4);
  const std::size_t hh = reference.height;
  const std::size_t ww = reference.width;
  const std::size_t crop_y = (hh - frame_h) / 2;
  const std::size_t crop_x = (ww - frame_w) / 2;

  Matrix x(r_samples, frame_h * frame_w);
  for (std::size_t i = 0; i < r_samples; ++i) {
    const std::size_t dy = shifts.below(2 * i, hh);
    const std::size_t dx = shifts.below(2 * i + 1, ww);
    auto row = x.row(i);
    for (std::size_t y = 0; y < frame_h; ++y) {
      const std::size_t src_y = (y + crop_y + dy) % hh;
      for (std::size_t xx = 0; xx < frame_w; ++xx) {
        const std::size_t src_x = (xx + crop_x + dx) % ww;
        row[y * frame_w + xx] = reference.at(src_y, src_x);
      }
    }
  }
  return FrameSeries(std::move(x), 1.0);
}

GrayImage make_texture(std::size_t width, std::size_t height,
                       std::uint64_t seed) {
  require(width >= 3 && height >= 3, "make_texture: need at least 3x3");
  const CounterRng rng = CounterRng(seed).substream(5);
  std::vector<double> raw(width * height);
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = 256.0 + 1000.0 * rng.uniform(i);

  // Light 3x3 cyclic box smoothing keeps a broad spectrum while adding
  // spatial structure.
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(raw.size());
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      double acc = 0.0;
      for (std::size_t dy = 0; dy < 3; ++dy) {
        const std::size_t yy = (y + height - 1 + dy) % height;
        for (std::size_t dx = 0; dx < 3; ++dx) {
          const std::size_t xx = (x + width - 1 + dx) % width;
          acc += raw[yy * width + xx];
        }
      }
      img.pixels[y * width + x] = std::floor(acc / 9.0);
    }
  }
  return img;
}

}  // namespace xpcs::synth
