#pragma once

#include <cstdint>

namespace repomech {

// Stateless mixer used to derive independent per-draw streams from one run
// seed; keeps Monte Carlo output identical for any thread count.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Minimal xorshift-style engine with a fixed, documented update rule so draws
// do not depend on standard-library internals.
class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : state_(splitmix64(seed)) {}

    uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double canonical() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  private:
    uint64_t state_;
};

}  // namespace repomech
