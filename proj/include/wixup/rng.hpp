#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wixup {

/// Finalizer from SplitMix64; a bijective avalanche on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over raw bytes. Stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stable per-task seed keyed on (global seed, sequence id, index, distance).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view seq_id,
                                    std::uint64_t index,
                                    std::uint64_t distance) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ fnv1a64(seq_id));
  h = mix64(h ^ index);
  h = mix64(h ^ (distance * 0x9e3779b97f4a7c15ULL));
  return h;
}

/// Seeded random stream. The engine output is fixed by the standard; the
/// distributions are implemented here so results do not depend on the
/// standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double low, double high) {
    return low + (high - low) * uniform();
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace wixup
