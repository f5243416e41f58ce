// xpcsvd: homomorphic SVD compression for photon-correlation series.
//
// Subcommands: generate, build-matrix, compress, ttc, g2, fit, visibility,
// bench. Exit codes: 0 success, 2 usage, 3 data/format, 4 numerical/rank.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "xpcsvd/analysis.hpp"
#include "xpcsvd/bench.hpp"
#include "xpcsvd/compress.hpp"
#include "xpcsvd/correlate.hpp"
#include "xpcsvd/encoder.hpp"
#include "xpcsvd/io.hpp"
#include "xpcsvd/synth.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

xpcs::LagWindow parse_window(const std::string& text, const char* flag) {
  double lo = 0.0, hi = 0.0;
  if (std::sscanf(text.c_str(), "%lf:%lf", &lo, &hi) != 2 || !(lo <= hi)) {
    throw CLI::ValidationError(std::string(flag) +
                               ": expected MIN:MAX with MIN <= MAX");
  }
  return {lo, hi};
}

std::pair<std::size_t, std::size_t> parse_shape(const std::string& text) {
  std::size_t h = 0, w = 0;
  if (std::sscanf(text.c_str(), "%zux%zu", &h, &w) != 2 || h < 1 || w < 1) {
    throw CLI::ValidationError("--frame-shape: expected HxW");
  }
  return {h, w};
}

struct FramesInput {
  std::string frames_path;
  std::string compressed_path;
  std::string mask_path;
  double frame_period = 0.0;  // 0 = take from file / default 1.0

  void add_flags(CLI::App* cmd, bool allow_compressed) {
    cmd->add_option("--frames", frames_path, "input frame series (XFSR)");
    if (allow_compressed) {
      cmd->add_option("--compressed", compressed_path,
                      "input compressed store (XCMP)");
    }
    cmd->add_option("--mask", mask_path,
                    "pixel mask (XMSK) applied to --frames input");
    cmd->add_option("--frame-period", frame_period,
                    "seconds per frame for lag axes (store inputs only)");
  }

  xpcs::FrameSeries load_frames() const {
    xpcs::FrameSeries frames = xpcs::io::read_frames(frames_path);
    if (!mask_path.empty()) {
      frames = xpcs::apply_mask(frames, xpcs::io::read_mask(mask_path));
    }
    return frames;
  }

  // TTC from whichever input was given, plus the lag scale.
  std::pair<xpcs::TTCMatrix, double> load_ttc() const {
    if (frames_path.empty() == compressed_path.empty()) {
      throw CLI::ValidationError(
          "provide exactly one of --frames / --compressed");
    }
    if (!frames_path.empty()) {
      xpcs::FrameSeries frames = load_frames();
      const double period =
          frame_period > 0.0 ? frame_period : frames.frame_period;
      return {xpcs::ttc_raw(frames), period};
    }
    const xpcs::CompressedSeries store =
        xpcs::io::read_compressed(compressed_path);
    const double period = frame_period > 0.0 ? frame_period : 1.0;
    return {xpcs::ttc_compressed(store), period};
  }
};

void print_spectrum_summary(const xpcs::EncodingMatrix& enc) {
  const xpcs::SpectrumReport report = xpcs::spectrum_report(enc);
  std::cout << "mode: " << xpcs::to_string(enc.mode()) << "\n"
            << "pixels: " << enc.n_pixels() << "\n"
            << "k: " << enc.k() << "\n"
            << "spectrum: " << report.spectrum.size() << " values, max "
            << report.spectrum.front() << ", min " << report.spectrum.back()
            << "\n"
            << "suggested k (factor 2): " << report.suggested_k
            << (report.degenerate ? " (degenerate: flat spectrum)" : "")
            << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"homomorphic SVD compression for photon correlation series"};
  app.require_subcommand(1);

  // ---- generate ----------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "write a synthetic frame series");
  std::string gen_kind;
  gen->add_option("kind", gen_kind, "oscillatory | relaxation | corpus")
      ->required();
  std::size_t gen_n = 256, gen_m = 2048, gen_samples = 1000;
  double gen_period = 40.0, gen_contrast = 0.5, gen_noise = 0.01;
  double gen_rho = 0.98, gen_frame_period = 1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_reference, gen_shape = "64x64";
  gen->add_option("--n", gen_n, "number of frames");
  gen->add_option("--m", gen_m, "pixels per frame");
  gen->add_option("--period", gen_period, "oscillation period in frames");
  gen->add_option("--contrast", gen_contrast, "oscillation contrast in [0,1]");
  gen->add_option("--noise", gen_noise, "additive noise level");
  gen->add_option("--rho", gen_rho, "relaxation AR factor in (0,1)");
  gen->add_option("--seed", gen_seed, "deterministic seed");
  gen->add_option("--frame-period", gen_frame_period, "seconds per frame");
  gen->add_option("--reference", gen_reference, "reference PGM for corpus");
  gen->add_option("--frame-shape", gen_shape, "corpus frame shape HxW");
  gen->add_option("--r-samples", gen_samples, "corpus sample count");
  gen->add_option("--out", gen_out, "output frames file")->required();

  // ---- build-matrix ------------------------------------------------------
  auto* build = app.add_subcommand("build-matrix", "construct an encoder");
  std::string build_mode;
  build->add_option("mode", build_mode,
                    "offline | online-related | online-unrelated")
      ->required();
  std::string build_frames, build_reference, build_out, build_shape = "64x64";
  std::size_t build_k = 0, build_samples = 1000;
  std::uint64_t build_seed = 1;
  build->add_option("--frames", build_frames, "training frames (XFSR)");
  build->add_option("--reference", build_reference, "reference PGM");
  build->add_option("--frame-shape", build_shape, "frame shape HxW");
  build->add_option("--r-samples", build_samples, "corpus sample count");
  build->add_option("--seed", build_seed, "corpus shift seed");
  build->add_option("--k", build_k, "columns to keep (0 = full rank)");
  build->add_option("--out", build_out, "output encoder file")->required();

  // ---- compress ----------------------------------------------------------
  auto* comp = app.add_subcommand("compress", "project frames onto an encoder");
  std::string comp_encoder, comp_out;
  bool comp_stream = false;
  FramesInput comp_in;
  comp_in.add_flags(comp, false);
  comp->add_option("--encoder", comp_encoder, "encoder file (XENC)")
      ->required();
  comp->add_option("--out", comp_out, "output store file (XCMP)")->required();
  comp->add_flag("--stream", comp_stream,
                 "replay frame by frame through the appender");

  // ---- ttc / g2 ----------------------------------------------------------
  auto* ttc = app.add_subcommand("ttc", "two-time correlation matrix to CSV");
  FramesInput ttc_in;
  std::string ttc_out;
  ttc_in.add_flags(ttc, true);
  ttc->add_option("--out", ttc_out, "output CSV")->required();

  auto* g2 = app.add_subcommand("g2", "lag-averaged correlation curve to CSV");
  FramesInput g2_in;
  std::string g2_out;
  g2_in.add_flags(g2, true);
  g2->add_option("--out", g2_out, "output CSV")->required();

  // ---- fit ---------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "KWW relaxation fit of the g2 curve");
  FramesInput fit_in;
  std::string fit_window_text, fit_out;
  fit_in.add_flags(fit, true);
  fit->add_option("--lag-window", fit_window_text, "fit window MIN:MAX seconds")
      ->required();
  fit->add_option("--out", fit_out, "optional JSON output path");

  // ---- visibility --------------------------------------------------------
  auto* vis = app.add_subcommand("visibility",
                                 "peak visibility and detectability verdict");
  FramesInput vis_in;
  std::string vis_peak, vis_base, vis_out;
  std::size_t vis_exclusion = 0;
  vis_in.add_flags(vis, true);
  vis->add_option("--peak-window", vis_peak, "peak window MIN:MAX seconds")
      ->required();
  vis->add_option("--baseline-window", vis_base,
                  "baseline window MIN:MAX seconds")
      ->required();
  vis->add_option("--exclusion", vis_exclusion,
                  "diagonal band half-width excluded from the background");
  vis->add_option("--out", vis_out, "optional JSON output path");

  // ---- bench -------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "raw vs compressed TTC timings");
  std::string bench_grid = "256x65536x64";
  std::string bench_out, bench_scratch;
  int bench_reps = 1;
  std::uint64_t bench_seed = 7;
  bench->add_option("--bench-grid", bench_grid,
                    "comma-separated NxMxK grid entries");
  bench->add_option("--reps", bench_reps, "minimum timing repetitions");
  bench->add_option("--seed", bench_seed, "seed for the synthetic series");
  bench->add_option("--scratch", bench_scratch,
                    "scratch directory for size measurements");
  bench->add_option("--out", bench_out, "machine-readable JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;  // --help exits 0, bad flags exit 2
  }

  if (gen->parsed()) {
    std::optional<xpcs::FrameSeries> frames;
    std::uint64_t seed = gen_seed;
    if (gen_kind == "oscillatory") {
      frames = xpcs::synth::gen_oscillatory(gen_n, gen_m, gen_period,
                                            gen_contrast, gen_noise, gen_seed,
                                            gen_frame_period);
    } else if (gen_kind == "relaxation") {
      frames = xpcs::synth::gen_relaxation(gen_n, gen_m, gen_rho, gen_seed,
                                           gen_frame_period);
    } else if (gen_kind == "corpus") {
      if (gen_reference.empty()) {
        throw CLI::ValidationError("generate corpus requires --reference");
      }
      const auto [h, w] = parse_shape(gen_shape);
      frames = xpcs::synth::gen_shifted_corpus(
          xpcs::io::read_pgm(gen_reference), gen_samples, h, w, gen_seed);
    } else {
      throw CLI::ValidationError("unknown generate kind \"" + gen_kind + "\"");
    }
    xpcs::io::write_frames(gen_out, *frames);
    std::cout << "n: " << frames->n_frames() << "\nm: " << frames->n_pixels()
              << "\nseed: " << seed << "\nout: " << gen_out << "\n";
    return 0;
  }

  if (build->parsed()) {
    std::optional<xpcs::EncodingMatrix> enc;
    if (build_mode == "offline") {
      if (build_frames.empty()) {
        throw CLI::ValidationError("offline mode requires --frames");
      }
      enc = xpcs::build_offline(xpcs::io::read_frames(build_frames));
      if (build_k > enc->k()) {
        throw xpcs::RankError("requested k = " + std::to_string(build_k) +
                                  " exceeds the numerical rank of the data",
                              enc->k());
      }
      if (build_k > 0) enc = xpcs::truncate(*enc, build_k);
    } else if (build_mode == "online-related") {
      if (build_frames.empty() || build_k == 0) {
        throw CLI::ValidationError(
            "online-related mode requires --frames and --k");
      }
      enc = xpcs::build_online_from_frames(xpcs::io::read_frames(build_frames),
                                           build_k);
    } else if (build_mode == "online-unrelated") {
      if (build_reference.empty() || build_k == 0) {
        throw CLI::ValidationError(
            "online-unrelated mode requires --reference and --k");
      }
      const auto [h, w] = parse_shape(build_shape);
      enc = xpcs::build_online(xpcs::io::read_pgm(build_reference),
                               build_samples, h, w, build_seed, build_k);
    } else {
      throw CLI::ValidationError("unknown build-matrix mode \"" + build_mode +
                                 "\"");
    }
    xpcs::io::write_encoder(build_out, *enc);
    print_spectrum_summary(*enc);
    std::cout << "out: " << build_out << "\n";
    return 0;
  }

  if (comp->parsed()) {
    if (comp_in.frames_path.empty()) {
      throw CLI::ValidationError("compress requires --frames");
    }
    const xpcs::FrameSeries frames = comp_in.load_frames();
    const xpcs::EncodingMatrix enc = xpcs::io::read_encoder(comp_encoder);
    if (comp_stream) {
      xpcs::io::CompressedFileAppender appender(comp_out, enc.k(),
                                                xpcs::content_hash_u64(enc));
      for (std::size_t i = 0; i < frames.n_frames(); ++i) {
        const auto [coeffs, norm] =
            xpcs::compress_frame(frames.intensities.row(i), enc);
        appender.append(coeffs, norm);
      }
      appender.close();
    } else {
      xpcs::io::write_compressed(comp_out, xpcs::compress_series(frames, enc));
    }
    std::cout << "frames: " << frames.n_frames() << "\nk: " << enc.k()
              << "\nout: " << comp_out << "\n";
    return 0;
  }

  if (ttc->parsed()) {
    const auto [g, period] = ttc_in.load_ttc();
    (void)period;
    xpcs::io::export_ttc_csv(ttc_out, g);
    std::cout << "n: " << g.n() << "\nlossless: " << (g.lossless() ? 1 : 0)
              << "\nout: " << ttc_out << "\n";
    return 0;
  }

  if (g2->parsed()) {
    const auto [g, period] = g2_in.load_ttc();
    xpcs::io::export_g2_csv(g2_out, xpcs::g2_from_ttc(g, period));
    std::cout << "n: " << g.n() << "\nout: " << g2_out << "\n";
    return 0;
  }

  if (fit->parsed()) {
    const auto [g, period] = fit_in.load_ttc();
    const xpcs::G2Curve curve = xpcs::g2_from_ttc(g, period);
    const xpcs::KwwFit result =
        xpcs::fit_kww(curve, parse_window(fit_window_text, "--lag-window"));
    json out = {{"baseline", result.baseline},
                {"contrast", result.contrast},
                {"relaxation_time_seconds", result.relaxation_time},
                {"residual_rms", result.residual_rms}};
    if (!fit_out.empty()) {
      std::ofstream f(fit_out);
      f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (vis->parsed()) {
    const auto [g, period] = vis_in.load_ttc();
    const xpcs::G2Curve curve = xpcs::g2_from_ttc(g, period);
    const xpcs::VisibilityReport report = xpcs::make_visibility_report(
        curve, g, parse_window(vis_peak, "--peak-window"),
        parse_window(vis_base, "--baseline-window"), vis_exclusion);
    json out = {{"peak_lag_seconds", report.peak_lag},
                {"peak_value", report.peak_value},
                {"baseline_value", report.baseline_value},
                {"visibility", report.visibility},
                {"ttc_background_sigma", report.ttc_background_sigma},
                {"detectable", report.detectable}};
    if (!vis_out.empty()) {
      std::ofstream f(vis_out);
      f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (bench->parsed()) {
    const auto grid = xpcs::bench::parse_grid(bench_grid);
    const std::string scratch =
        bench_scratch.empty()
            ? (std::filesystem::temp_directory_path() / "xpcsvd_bench").string()
            : bench_scratch;
    const xpcs::bench::BenchReport report =
        xpcs::bench::run_bench(grid, bench_reps, bench_seed, scratch);

    json entries = json::array();
    for (const auto& r : report.results) {
      entries.push_back({{"n", r.n},
                         {"m", r.m},
                         {"k", r.k},
                         {"raw_ttc_seconds", r.raw_ttc_seconds},
                         {"compressed_ttc_seconds", r.compressed_ttc_seconds},
                         {"speedup", r.speedup},
                         {"encoder_build_seconds", r.encoder_build_seconds},
                         {"compress_seconds", r.compress_seconds},
                         {"frames_file_bytes", r.frames_file_bytes},
                         {"encoder_file_bytes", r.encoder_file_bytes},
                         {"store_file_bytes", r.store_file_bytes},
                         {"cr_offline_measured", r.cr_offline_measured},
                         {"cr_online_measured", r.cr_online_measured},
                         {"cr_offline_formula", r.cr_offline_formula},
                         {"cr_online_formula", r.cr_online_formula}});
    }
    json scaling = json::array();
    for (const auto& s : report.scaling) {
      scaling.push_back(
          {{"n", s.n}, {"k", s.k}, {"m_values", s.m_values}, {"slope", s.slope}});
    }
    json out = {{"results", entries}, {"raw_scaling", scaling}};
    if (!bench_out.empty()) {
      std::ofstream f(bench_out);
      f << out.dump(2) << "\n";
    }

    for (const auto& r : report.results) {
      std::printf(
          "n=%zu m=%zu k=%zu  raw %.4fs  compressed %.6fs  speedup %.1fx  "
          "CR offline %.2f (formula %.2f)  CR online %.2f (formula %.2f)\n",
          r.n, r.m, r.k, r.raw_ttc_seconds, r.compressed_ttc_seconds,
          r.speedup, r.cr_offline_measured, r.cr_offline_formula,
          r.cr_online_measured, r.cr_online_formula);
    }
    for (const auto& s : report.scaling) {
      std::printf("raw TTC log-log slope vs m at n=%zu k=%zu: %.3f\n", s.n,
                  s.k, s.slope);
    }
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const xpcs::RankError& e) {
    std::cerr << "error: " << e.what()
              << " (achievable rank: " << e.achievable_rank() << ")\n";
    return kExitNumerical;
  } catch (const xpcs::FitDegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const xpcs::FitError& e) {
    std::cerr << "error: " << e.what() << " (best iterate: B="
              << e.best().baseline << " C=" << e.best().contrast
              << " t0=" << e.best().relaxation_time << ")\n";
    return kExitNumerical;
  } catch (const xpcs::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const xpcs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
