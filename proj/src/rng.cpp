#include "xpcsvd/rng.hpp"

#include <cmath>

namespace xpcs {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStream = 0xD6E8FEB86659FD93ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng CounterRng::substream(std::uint64_t tag) const {
  return CounterRng(mix(base_ ^ (tag * kStream)));
}

std::uint64_t CounterRng::bits(std::uint64_t index) const {
  return mix(base_ + (index + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t index) const {
  return static_cast<double>((bits(index) >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

double CounterRng::exponential(std::uint64_t index) const {
  return -std::log(uniform(index));
}

std::uint64_t CounterRng::below(std::uint64_t index, std::uint64_t bound) const {
  return bits(index) % bound;
}

}  // namespace xpcs
