#pragma once

// Deterministic PRNG used across the project: xoshiro256** with splitmix64
// seeding. The integer stream is reproducible bit-for-bit across platforms;
// every experiment threads an explicit seed through this generator, so
// serial and parallel runs of the same configuration agree.

#include <cmath>
#include <cstdint>

namespace cogsim {

// splitmix64: seed expander and cheap stream-derivation hash.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent child seed, e.g. one per trial index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed = 0x6a09e667f3bcc908ULL) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) via Lemire's multiply-shift reduction.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Standard Box-Muller transform; one fresh sample per call.
    double gaussian(double mean = 0.0, double stddev = 1.0) {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double z = radius * std::cos(6.283185307179586476925286766559 * u2);
        return mean + stddev * z;
    }

    // +1 or -1 with equal probability.
    double bipolar() { return (next() >> 63) ? 1.0 : -1.0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

}  // namespace cogsim
