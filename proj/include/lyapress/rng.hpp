#ifndef LYAPRESS_RNG_HPP
#define LYAPRESS_RNG_HPP

#include <cstdint>

namespace lyapress {

// Splitmix64: small, fast, and identical on every platform.  All randomized
// machinery in the library (optimizer restarts, monte-carlo sampling, cone
// boundary sampling in high dimension) draws from this so that a fixed seed
// yields byte-identical artifacts regardless of thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

    // derive an independent stream (e.g. per restart, per sample index)
    static Rng sub_stream(std::uint64_t seed, std::uint64_t index) {
        Rng mix(seed ^ (0x632be59bd9b4e019ULL * (index + 1)));
        mix.next_u64();
        return mix;
    }

private:
    std::uint64_t state_;
};

} // namespace lyapress

#endif
