#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace otfs {

// splitmix64 finalizer; used to decorrelate substream seeds
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seeded random source. Every stochastic operation in the library takes one
// of these explicitly; parallel work derives independent substreams so a
// fixed seed gives the same result for any worker count.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), eng_(mix64(seed)) {}

  uint64_t seed() const { return seed_; }

  Rng substream(uint64_t id) const { return Rng(mix64(seed_ ^ mix64(id ^ 0xa55a5aa5ull))); }

  uint64_t u64() { return eng_(); }

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(eng_);
  }

  // inclusive on both ends
  int uniform_int(int a, int b) {
    return std::uniform_int_distribution<int>(a, b)(eng_);
  }

  double gauss() { return norm_(eng_); }

  // circularly symmetric complex gaussian with total variance var
  std::complex<double> cgauss(double var) {
    const double s = std::sqrt(var * 0.5);
    const double re = gauss();
    const double im = gauss();
    return {s * re, s * im};
  }

 private:
  uint64_t seed_;
  std::mt19937_64 eng_;
  std::normal_distribution<double> norm_;
};

}  // namespace otfs
