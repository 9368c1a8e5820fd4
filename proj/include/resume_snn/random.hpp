#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace resume_snn {

// Deterministic random stream. Only the engine and seed_seq are used from
// <random>: their output is fixed by the standard, unlike the distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [low, high].
  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n); n must be a power of two no larger than 2^63.
  std::uint64_t below_pow2(std::uint64_t n) { return n <= 1 ? 0 : engine_() >> (64 - std::countr_zero(n)); }

 private:
  std::mt19937_64 engine_;
};

/// Seed for run `index` of a batch rooted at `base`. Distinct (base, index)
/// pairs give unrelated streams; the mapping is stable across platforms.
inline std::uint64_t derive_run_seed(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace resume_snn
