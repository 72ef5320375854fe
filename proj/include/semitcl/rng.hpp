#pragma once

#include <array>
#include <cstdint>

namespace semitcl {

// Deterministic 64-bit generator (xoshiro256++ seeded via splitmix64).
// Every random draw in the toolkit goes through this class so that runs
// reproduce bit-for-bit regardless of platform or standard library.
class Rng {
 public:
  using State = std::array<std::uint64_t, 4>;

  explicit Rng(std::uint64_t seed);
  explicit Rng(const State& state) : state_(state) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [lo, hi] inclusive, rejection sampled (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller. The paired value is discarded so the
  // generator state stays a plain 4-word array.
  double gaussian();
  double gaussian(double mean, double sigma);

  const State& state() const { return state_; }

 private:
  State state_{};
};

}  // namespace semitcl
