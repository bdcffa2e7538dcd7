#pragma once

#include <cmath>
#include <cstdint>

namespace hoi {

// Counter-based deterministic RNG. Streams are derived by hashing a key tuple
// (seed, env index, step, purpose), so draws are independent of call order
// across environments and identical across runs.
struct Rng {
  uint64_t state = 0x9e3779b97f4a7c15ull;

  Rng() = default;
  explicit Rng(uint64_t seed) : state(splitmix(seed ^ 0x2545f4914f6cdd1dull)) {}

  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // Derive an independent stream from up to four key components.
  static Rng keyed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = splitmix(seed);
    h = splitmix(h ^ (a + 0x9e3779b97f4a7c15ull));
    h = splitmix(h ^ (b + 0xc2b2ae3d27d4eb4full));
    h = splitmix(h ^ (c + 0x165667b19e3779f9ull));
    Rng r;
    r.state = h;
    return r;
  }

  uint64_t next_u64() {
    state = splitmix(state);
    return state;
  }

  // Uniform in [0, 1).
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) { return int(next_u64() % uint64_t(n)); }

  // Standard normal via Box-Muller; two uniforms per draw, no cached state.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

}  // namespace hoi
