#pragma once

#include <array>
#include <cstdint>
#include <vector>

// Self-contained generators with a fully specified output stream. Standard
// <random> distributions are implementation-defined, which would break the
// frozen Monte-Carlo regression values and byte-identical CSV contract.

namespace scgame {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256** seeded via splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

/// Index sampled from `weights` (summing to ~1) by CDF inversion at u in [0,1).
inline std::size_t sample_from(const std::vector<double>& weights, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return k;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

/// Independent streams for one simulated trace, all derived from one master
/// seed. Separate streams keep runs with different policies comparable under
/// the same seed: the market and report draws do not shift when noise is
/// switched on or off.
struct SimStreams {
    Rng market;
    Rng report;
    Rng noise;

    explicit SimStreams(std::uint64_t master_seed)
        : market(derive(master_seed, 1)), report(derive(master_seed, 2)), noise(derive(master_seed, 3)) {}

  private:
    static std::uint64_t derive(std::uint64_t master, int stream) {
        SplitMix64 sm(master);
        std::uint64_t v = 0;
        for (int k = 0; k < stream; ++k) v = sm.next();
        return v;
    }
};

} // namespace scgame
