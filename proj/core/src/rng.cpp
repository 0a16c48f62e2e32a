#include "kanppo/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kanppo {

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;  // 2^64 / golden ratio

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

uint64_t Rng::next_u64() {
  counter_ += 1;
  return mix64(seed_ + counter_ * kGamma);
}

uint64_t Rng::next_below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::next_below: n must be > 0");
  // Multiply-high map of the 64-bit draw onto [0, n); bias < n / 2^64.
  return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + uniform() * (hi - lo);
}

double Rng::gaussian(double mean, double std) {
  if (std <= 0.0) throw std::invalid_argument("Rng::gaussian: std must be > 0");
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + std * z;
}

Rng Rng::split(uint64_t tag) const {
  return Rng(mix64(seed_ ^ mix64(tag + kGamma)));
}

}  // namespace kanppo
