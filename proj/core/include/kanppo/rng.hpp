#ifndef KANPPO_RNG_HPP_
#define KANPPO_RNG_HPP_

#include <cstdint>

namespace kanppo {

// Deterministic counter-based generator (SplitMix64 finalizer over
// seed + counter*gamma). The same seed yields the same stream on every
// platform: the integer path uses only 64-bit wraparound arithmetic and
// the uniform double is an exact dyadic of the top 53 bits.
//
// split(tag) derives an independent child stream from (seed, tag) only,
// so equal tags reproduce the same child regardless of how much the
// parent has been consumed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {}

  uint64_t next_u64();

  // In [0, n). n must be > 0.
  uint64_t next_below(uint64_t n);

  // In [0, 1), 53-bit resolution.
  double uniform();

  // In [lo, hi).
  double uniform(double lo, double hi);

  // N(mean, std^2) via Box-Muller (cosine branch, two uniforms per draw).
  // Throws std::invalid_argument if std <= 0.
  double gaussian(double mean, double std);

  Rng split(uint64_t tag) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace kanppo

#endif  // KANPPO_RNG_HPP_
