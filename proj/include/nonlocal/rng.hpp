#pragma once

#include <cstdint>

namespace nonlocal {

/// splitmix64: small, fast, and good enough for Monte Carlo sampling here.
/// One instance per walker, keyed off (seed, stream), makes results
/// bit-identical regardless of the thread schedule.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        Rng mixer(seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
        return Rng(mixer.next());
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double uniform_oc() { return 1.0 - uniform(); }

    bool coin() { return (next() & 1ULL) != 0; }

private:
    std::uint64_t state_;
};

}  // namespace nonlocal
