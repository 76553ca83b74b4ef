#pragma once

#include <cstdint>
#include <random>

namespace aptest {

// Deterministic RNG wrapper. One Rng per trial/oracle; trial seeds are
// derived as master_seed ^ trial_index so independent trials never share
// a stream and results do not depend on worker scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    double gaussian() { return normal_(gen_); }

    bool coin() { return (gen_() & 1u) != 0; }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return master_seed ^ trial_index;
}

// splitmix64 finalizer; used as a stateless PRF for memoized coin labels
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace aptest
