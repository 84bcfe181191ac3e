#pragma once

#include <cstdint>
#include <random>

namespace pilotgrid {

// splitmix64 step; used both as a stream mixer and to derive substream seeds
// so that e.g. marks and locations come from decoupled generators.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child seed for substream `stream` of `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// Thin wrapper around mt19937_64 with explicit, stable mappings to doubles
// and bounded ints (the std::uniform_* distributions are not pinned by the
// standard, so we do the mapping ourselves).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return (engine_() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1); never returns 0 (safe for log())
    double next_double_pos() {
        double u;
        do {
            u = next_double();
        } while (u == 0.0);
        return u;
    }

    // uniform integer in [0, n), n >= 1; rejection to avoid modulo bias
    std::uint64_t next_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Exact Poisson sample by multiplicative (Knuth) method, chunked so that
    // exp(-lambda) never underflows for large means.
    std::uint64_t next_poisson(double mean);

private:
    std::mt19937_64 engine_;
};

}  // namespace pilotgrid
