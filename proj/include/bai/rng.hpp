#pragma once

#include <cstdint>
#include <random>

namespace bai {

// splitmix64 finalizer (Steele et al.). Bijective on 64-bit words; we use it
// both to scramble user seeds before they hit the engine and to derive
// per-run streams from (master_seed, policy, delta, run_index).
constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seeded deterministic stream. One stream per run, never shared across
// threads; identical seed and call sequence give bit-identical draws.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(splitmix64(seed)) {}

  std::mt19937_64& engine() { return engine_; }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bai
