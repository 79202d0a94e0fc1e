// Counter-based deterministic random numbers (splitmix64) so that seeded
// runs reproduce bitwise across platforms.
#pragma once

#include <cstdint>

#include "nlslab/field.hpp"

namespace nlslab {

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // splitmix64 applied to (seed, counter)
    std::uint64_t next_u64() {
        std::uint64_t z = (seed_ + 0x9E3779B97F4A7C15ULL * ++counter_);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1)
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // uniform in (lo, hi)
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Smooth decaying random field: a small sum of Gaussian bumps with seeded
// centers, widths and amplitudes.
Field random_smooth_field(const GridPtr& grid, CounterRng& rng, int n_bumps = 4);

}  // namespace nlslab
