#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace levyspde {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Reproducible random stream. The triple (seed, stream_index, substream) fully
// determines the draw sequence; distinct triples give independent streams.
// Trajectory-level parallelism assigns one stream_index per trajectory and
// role-separated substreams via fork().
//
// All samplers are implemented on top of raw 64-bit output so that sequences
// are identical across standard library implementations (std distributions
// are implementation-defined).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index, std::uint64_t substream = 0)
        : seed_(seed), stream_(stream_index), sub_(substream) {
        std::uint64_t s = seed ^ (0xA3EC647659359ACDull * (stream_index + 1))
                               ^ (0x9E6C63D0A0D0A9F5ull * (substream + 1));
        const std::uint32_t words[8] = {
            lo32(splitmix64(s)), hi32(splitmix64(s)), lo32(splitmix64(s)), hi32(splitmix64(s)),
            lo32(splitmix64(s)), hi32(splitmix64(s)), lo32(splitmix64(s)), hi32(splitmix64(s))};
        std::seed_seq seq(words, words + 8);
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }
    std::uint64_t substream() const { return sub_; }

    // Independent stream derived from this one's identity (does not advance *this).
    RngStream fork(std::uint64_t substream_salt) const {
        return RngStream(seed_, stream_, sub_ * 0x100000001ull + substream_salt + 1);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0,1); never returns 0 or 1, safe under log().
    double uniform01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Exponential with mean 1.
    double exponential() { return -std::log(uniform01()); }

    // Exact Poisson draw by the multiplication method; large means are split
    // (a sum of independent Poissons is Poisson).
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 32.0) {
            total += poisson_small(32.0);
            mean -= 32.0;
        }
        return total + poisson_small(mean);
    }

private:
    static std::uint32_t lo32(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
    static std::uint32_t hi32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = uniform01();
        while (p > limit) {
            ++k;
            p *= uniform01();
        }
        return k;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t sub_;
    std::mt19937_64 engine_;
};

} // namespace levyspde
