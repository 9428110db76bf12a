#pragma once

// Deterministic, splittable random streams.
//
// Every random quantity in the library is drawn from an RngStream obtained by
// key derivation from a 64-bit master seed.  The derivation is bit-exact and
// platform independent:
//
//   mix64(x)        = SplitMix64 finalizer (Steele/Lea/Flood constants)
//   derive(key, k)  = mix64(key ^ (mix64(k) + 0x9E3779B97F4A7C15))
//   RngStream state = derive(...); next_u64() steps state by the golden gamma
//                     and returns mix64(state)  (i.e. SplitMix64 itself)
//
// Identical (master_seed, derivation path) gives identical draws on every
// platform and for any worker count, because streams are derived per logical
// unit of work (replication, cube, stage/step) rather than shared.
//
// Pair coins: the edge coin for an id pair {a,b} is
//   pair_coin_u01(salt, min(a,b), max(a,b))
// so the outcome does not depend on the order in which pairs are enumerated.

#include <cmath>
#include <cstdint>

namespace rcm {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t derive(std::uint64_t key, std::uint64_t k) {
  return mix64(key ^ (mix64(k) + kGolden));
}

// Map 64 random bits to a double in [0,1).
inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stream tags used as the first derivation step so that different purposes
// never share a stream even for equal numeric indices.
enum : std::uint64_t {
  kTagPoints = 0x706F696E74735F31ull,
  kTagCoins = 0x636F696E735F5F31ull,
  kTagThin = 0x7468696E5F5F5F31ull,
  kTagLevels = 0x6C6576656C735F31ull,
  kTagExperiment = 0x65787065725F5F31ull,
  kTagCube = 0x637562655F5F5F31ull,
  kTagSprinkle = 0x7370726E6B6C5F31ull,
  kTagSite = 0x736974655F5F5F31ull,
  kTagOracle = 0x6F7261636C655F31ull,
};

class RngStream {
 public:
  RngStream() : state_(0) {}
  explicit RngStream(std::uint64_t key) : state_(key) {}

  static RngStream from(std::uint64_t key, std::uint64_t k) {
    return RngStream(derive(key, k));
  }

  std::uint64_t key() const { return state_; }

  RngStream sub(std::uint64_t k) const { return RngStream(derive(state_, k)); }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  double next_u01() { return u01_from_bits(next_u64()); }

  // Uniform integer in [0, n) by rejection; exact for any n > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Exact Poisson sampling: multiplication method for small means,
  // Hormann's PTRS transformed rejection for large means.
  std::uint64_t next_poisson(double mean);

 private:
  std::uint64_t state_;
};

inline std::uint64_t poisson_small(RngStream& s, double mean) {
  const double threshold = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = s.next_u01();
  while (prod > threshold) {
    ++k;
    prod *= s.next_u01();
  }
  return k;
}

inline std::uint64_t poisson_ptrs(RngStream& s, double mean) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = s.next_u01() - 0.5;
    double v = s.next_u01();
    double us = 0.5 - std::abs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
  }
}

inline std::uint64_t RngStream::next_poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) return poisson_small(*this, mean);
  return poisson_ptrs(*this, mean);
}

// Order-independent edge coin for an unordered id pair.
inline double pair_coin_u01(std::uint64_t salt, std::int64_t a, std::int64_t b) {
  if (a > b) {
    std::int64_t t = a;
    a = b;
    b = t;
  }
  std::uint64_t h = salt;
  h = mix64(h ^ (static_cast<std::uint64_t>(a) + kGolden));
  h = mix64(h ^ (static_cast<std::uint64_t>(b) + 0xC2B2AE3D27D4EB4Full));
  return u01_from_bits(h);
}

}  // namespace rcm
