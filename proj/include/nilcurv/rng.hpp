#pragma once

#include <cstdint>

namespace nilcurv {

/// Counter-based deterministic generator (splitmix64 output function over an
/// additively-stepped state). Identical seeds reproduce identical sequences
/// on every platform; substreams give independent, scheduling-free streams
/// for parallel restarts.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

/// Stream `index` derived from `seed`: mixes the index into the seed so
/// distinct indices give decorrelated generators regardless of which thread
/// consumes them.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 outer(seed);
  std::uint64_t base = outer.next();
  return SplitMix64(base ^ (0xd1b54a32d192ed03ULL + index * 0x9e3779b97f4a7c15ULL));
}

} // namespace nilcurv
