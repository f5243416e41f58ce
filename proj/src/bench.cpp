#include "xpcsvd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>

#include "xpcsvd/compress.hpp"
#include "xpcsvd/correlate.hpp"
#include "xpcsvd/encoder.hpp"
#include "xpcsvd/io.hpp"
#include "xpcsvd/synth.hpp"

namespace xpcs::bench {

namespace {

double time_once(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

// Median over enough repetitions that short operations are not lost in
// timer noise: at least min_reps, and at least ~0.3 s of total run time.
double measure(const std::function<void()>& fn, int min_reps) {
  std::vector<double> samples;
  samples.push_back(time_once(fn));
  const double est = std::max(samples[0], 1e-7);
  const int target =
      std::clamp<int>(static_cast<int>(0.3 / est), min_reps, 501);
  while (static_cast<int>(samples.size()) < target)
    samples.push_back(time_once(fn));
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

CompressedSeries identity_compress(const FrameSeries& frames) {
  // k = m degenerate case: projection onto the full pixel space is the
  // identity on normalized rows, no encoder involved.
  auto [normalized, norms] = row_normalize(frames.intensities);
  std::vector<double> coeffs(normalized.data().begin(),
                             normalized.data().end());
  return CompressedSeries(frames.n_pixels(), 0, std::move(coeffs),
                          std::move(norms));
}

}  // namespace

std::vector<BenchConfig> parse_grid(const std::string& text) {
  std::vector<BenchConfig> grid;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    BenchConfig cfg{};
    if (std::sscanf(item.c_str(), "%zux%zux%zu", &cfg.n, &cfg.m, &cfg.k) != 3 ||
        cfg.n < 2 || cfg.m < 2 || cfg.k < 1) {
      throw ContractError("bad bench grid entry \"" + item +
                          "\", expected NxMxK");
    }
    grid.push_back(cfg);
    pos = end + 1;
  }
  if (grid.empty()) throw ContractError("empty bench grid");
  return grid;
}

namespace {

// Work shared by grid entries with the same (n, m): the synthetic series,
// its raw TTC timing, and the full-rank offline encoder.
struct SharedState {
  std::size_t n = 0, m = 0;
  std::unique_ptr<FrameSeries> frames;
  std::unique_ptr<EncodingMatrix> full_encoder;
  double raw_ttc_seconds = 0.0;
  double encoder_build_seconds = 0.0;
  std::uint64_t frames_file_bytes = 0;
};

}  // namespace

BenchReport run_bench(const std::vector<BenchConfig>& grid, int min_reps,
                      std::uint64_t seed, const std::string& scratch_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(scratch_dir);
  const fs::path frames_path = fs::path(scratch_dir) / "bench_frames.xfs";
  const fs::path encoder_path = fs::path(scratch_dir) / "bench_encoder.xenc";
  const fs::path store_path = fs::path(scratch_dir) / "bench_store.xcmp";

  SharedState shared;
  BenchReport report;
  for (const BenchConfig& cfg : grid) {
    BenchResult r;
    r.n = cfg.n;
    r.m = cfg.m;
    r.k = cfg.k;

    if (!shared.frames || shared.n != cfg.n || shared.m != cfg.m) {
      shared = SharedState{};
      shared.n = cfg.n;
      shared.m = cfg.m;
      shared.frames = std::make_unique<FrameSeries>(
          synth::gen_oscillatory(cfg.n, cfg.m, 40.0, 0.5, 0.01, seed));
      shared.raw_ttc_seconds =
          measure([&] { ttc_raw(*shared.frames); }, min_reps);
      io::write_frames(frames_path.string(), *shared.frames,
                       io::FrameDtype::kF64);
      shared.frames_file_bytes = fs::file_size(frames_path);
    }
    const FrameSeries& frames = *shared.frames;
    r.raw_ttc_seconds = shared.raw_ttc_seconds;
    r.frames_file_bytes = shared.frames_file_bytes;

    CompressedSeries store(1, 0);
    if (cfg.k == cfg.m) {
      r.compress_seconds = time_once([&] { store = identity_compress(frames); });
    } else {
      if (!shared.full_encoder) {
        const auto t0 = std::chrono::steady_clock::now();
        shared.full_encoder =
            std::make_unique<EncodingMatrix>(build_offline(frames));
        shared.encoder_build_seconds = std::chrono::duration<double>(
                                           std::chrono::steady_clock::now() - t0)
                                           .count();
      }
      r.encoder_build_seconds = shared.encoder_build_seconds;
      const EncodingMatrix enc_k = truncate(*shared.full_encoder, cfg.k);
      io::write_encoder(encoder_path.string(), enc_k);
      r.encoder_file_bytes = fs::file_size(encoder_path);
      r.compress_seconds =
          time_once([&] { store = compress_series(frames, enc_k); });
    }
    io::write_compressed(store_path.string(), store);
    r.store_file_bytes = fs::file_size(store_path);

    r.compressed_ttc_seconds = measure([&] { ttc_compressed(store); }, min_reps);
    r.speedup = r.raw_ttc_seconds / r.compressed_ttc_seconds;

    r.cr_offline_formula =
        static_cast<double>(cfg.n) / static_cast<double>(cfg.k);
    r.cr_online_formula =
        static_cast<double>(cfg.m) / static_cast<double>(cfg.k);
    if (r.encoder_file_bytes > 0) {
      r.cr_offline_measured = static_cast<double>(r.frames_file_bytes) /
                              static_cast<double>(r.encoder_file_bytes);
    }
    r.cr_online_measured = static_cast<double>(r.frames_file_bytes) /
                           static_cast<double>(r.store_file_bytes);

    fs::remove(encoder_path);
    fs::remove(store_path);
    report.results.push_back(r);
  }
  fs::remove(frames_path);

  std::map<std::pair<std::size_t, std::size_t>, std::vector<const BenchResult*>>
      groups;
  for (const auto& r : report.results) groups[{r.n, r.k}].push_back(&r);
  for (const auto& [key, members] : groups) {
    std::map<std::size_t, double> by_m;
    for (const auto* r : members) by_m[r->m] = r->raw_ttc_seconds;
    if (by_m.size() < 2) continue;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [m, t] : by_m) {
      const double x = std::log(static_cast<double>(m));
      const double y = std::log(t);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double count = static_cast<double>(by_m.size());
    ScalingGroup group;
    group.n = key.first;
    group.k = key.second;
    for (const auto& [m, t] : by_m) group.m_values.push_back(m);
    group.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    report.scaling.push_back(group);
  }
  return report;
}

}  // namespace xpcs::bench
