#ifndef XPCSVD_RNG_HPP_
#define XPCSVD_RNG_HPP_

#include <cstdint>

namespace xpcs {

// Counter-based deterministic random generator.
//
// Output i of a stream with base b is
//
//   out(b, i) = mix(b + (i + 1) * 0x9E3779B97F4A7C15)
//
// where mix is the splitmix64 finalizer
//
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27;  z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
//
// Substream t of a stream rebases at mix(b ^ (t * 0xD6E8FEB86659FD93)).
// Any index can be evaluated independently of the others, so the same
// (seed, substream, index) triple yields the same value in any language
// that reproduces these constants.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : base_(seed) {}

  // Independent stream derived from this one.
  CounterRng substream(std::uint64_t tag) const;

  std::uint64_t bits(std::uint64_t index) const;

  // Uniform on (0, 1]: (bits >> 11 + 1) * 2^-53. Never zero, so it is
  // safe under log().
  double uniform(std::uint64_t index) const;

  // Standard normal via Box-Muller on indices (2*index, 2*index + 1).
  double normal(std::uint64_t index) const;

  // Unit-mean exponential, -log(uniform).
  double exponential(std::uint64_t index) const;

  // Uniform integer in [0, bound) by modulo reduction. The modulo bias is
  // below 2^-32 for the bounds used here (image dimensions).
  std::uint64_t below(std::uint64_t index, std::uint64_t bound) const;

 private:
  std::uint64_t base_;
};

}  // namespace xpcs

#endif  // XPCSVD_RNG_HPP_
