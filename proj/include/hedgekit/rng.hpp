#pragma once

#include <cmath>
#include <cstdint>

namespace hedgekit::rng {

// SplitMix64 finalizer.  Full-avalanche mixing, used both as the generator
// step and to derive independent child streams from (seed, id, ...) tuples.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based SplitMix64 stream.  Cheap to construct, so every replicate,
// pool, or selection gets its own stream and results never depend on
// scheduling order or thread count.
class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state), origin_(state) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1): (k + 1/2) * 2^-53 never hits an end.
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform index in [0, k).  k <= 2^53 keeps the float path exact enough;
  // pool sizes here are far smaller.
  std::size_t next_index(std::size_t k) {
    std::size_t i = static_cast<std::size_t>(next_unit() * static_cast<double>(k));
    return i < k ? i : k - 1;
  }

  // Poisson variate by Knuth's product method.  Rates above 30 are split
  // using Poisson additivity, so cost is O(mu) and the result stays exact.
  std::uint64_t next_poisson(double mu) {
    std::uint64_t total = 0;
    while (mu > 30.0) {
      total += poisson_knuth(30.0);
      mu -= 30.0;
    }
    return total + poisson_knuth(mu);
  }

  // State the stream was created with; recorded in Selection for provenance.
  std::uint64_t origin() const { return origin_; }

 private:
  std::uint64_t poisson_knuth(double mu) {
    if (mu <= 0.0) return 0;
    const double limit = std::exp(-mu);
    std::uint64_t k = 0;
    double prod = 1.0;
    do {
      ++k;
      prod *= next_unit();
    } while (prod > limit);
    return k - 1;
  }

  std::uint64_t state_;
  std::uint64_t origin_;
};

// Child stream for (seed, a, b, c).  Each id is mixed independently before
// combining, so nearby ids give unrelated streams.
inline Stream fork(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                   std::uint64_t c = 0) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ mix64(a + 0x9e3779b97f4a7c15ull));
  s = mix64(s ^ mix64(b + 0x3c6ef372fe94f82bull));
  s = mix64(s ^ mix64(c + 0x1d8e4e27c47d124full));
  return Stream(s);
}

}  // namespace hedgekit::rng

namespace hedgekit {
using rng::fork;
using rng::mix64;
using rng::Stream;
}  // namespace hedgekit
