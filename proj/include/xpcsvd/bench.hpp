#ifndef XPCSVD_BENCH_HPP_
#define XPCSVD_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "xpcsvd/model.hpp"

namespace xpcs::bench {

struct BenchConfig {
  std::size_t n;
  std::size_t m;
  std::size_t k;
};

// One grid point. Times are medians over adaptive repetitions; the
// compression ratios come from the sizes of actual files on disk.
struct BenchResult {
  std::size_t n = 0, m = 0, k = 0;
  double raw_ttc_seconds = 0.0;
  double compressed_ttc_seconds = 0.0;
  double speedup = 0.0;  // raw / compressed
  double encoder_build_seconds = 0.0;
  double compress_seconds = 0.0;
  std::uint64_t frames_file_bytes = 0;
  std::uint64_t encoder_file_bytes = 0;  // 0 for the k = m degenerate case
  std::uint64_t store_file_bytes = 0;
  double cr_offline_measured = 0.0;  // frames file / encoder file
  double cr_online_measured = 0.0;   // frames file / store file
  double cr_offline_formula = 0.0;   // N / K
  double cr_online_formula = 0.0;    // M / K
};

// Least-squares log-log slope of raw TTC time versus m over grid entries
// sharing (n, k). Slope near 1 confirms the O(n^2 m) cost model.
struct ScalingGroup {
  std::size_t n = 0, k = 0;
  std::vector<std::size_t> m_values;
  double slope = 0.0;
};

struct BenchReport {
  std::vector<BenchResult> results;
  std::vector<ScalingGroup> scaling;
};

// Runs every grid point on a deterministic synthetic oscillatory series.
// k may be any value up to the series rank, or exactly m (projection onto
// the full pixel space, the no-compression baseline).
BenchReport run_bench(const std::vector<BenchConfig>& grid, int min_reps,
                      std::uint64_t seed, const std::string& scratch_dir);

// Parses "NxMxK[,NxMxK...]" grid descriptions.
std::vector<BenchConfig> parse_grid(const std::string& text);

}  // namespace xpcs::bench

#endif  // XPCSVD_BENCH_HPP_
