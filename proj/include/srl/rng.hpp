#pragma once

#include <cmath>
#include <cstdint>

#include "srl/errors.hpp"

namespace srl {

// Counter-based pseudo-random stream built on the SplitMix64 finalizer.
// Draw i of a stream with key k is mix64(k + (i+1) * GAMMA); child streams
// are forked with fold_in, which derives a fresh key from (key, tag). The
// derivation rules are part of the data-format contract (see README) so a
// dataset can be regenerated from its config alone.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  // Forks a child stream. Independent of how many draws were consumed.
  [[nodiscard]] Rng fold_in(std::uint64_t tag) const {
    return Rng(mix64(key_ ^ mix64(tag ^ 0xA5C39EDE82F1B2B4ull)));
  }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

  // Uniform in [0, 1) with 53 significant bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) without modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw ArgumentError("Rng::next_below: n must be positive");
    const std::uint64_t threshold = (0ull - n) % n;  // 2^64 mod n
    std::uint64_t x = next_u64();
    while (x < threshold) x = next_u64();
    return x % n;
  }

  // Standard normal via Box-Muller (cosine branch, two draws per value).
  double next_gaussian() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace srl
