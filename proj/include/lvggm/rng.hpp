#pragma once

#include <cmath>
#include <cstdint>

namespace lvggm {

// SplitMix64 generator (Steele, Lea & Flood). Chosen because independent
// streams can be derived by mixing a (seed, stream index) pair, which is
// what the replicate-parallel harness needs, and because its output is
// fully specified -- no implementation-defined distributions are involved
// anywhere, so runs are reproducible bit for bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream for (seed, key); used one level deeper as
    // (seed, cell, replicate) by chaining.
    static Rng stream(std::uint64_t seed, std::uint64_t key) {
        Rng g(seed);
        g.state_ = g.next_u64() + key * 0x9E3779B97F4A7C15ull;
        g.next_u64();
        return g;
    }

    static Rng stream(std::uint64_t seed, std::uint64_t key1, std::uint64_t key2) {
        Rng g = stream(seed, key1);
        g.state_ = g.next_u64() + key2 * 0x9E3779B97F4A7C15ull;
        g.next_u64();
        return g;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny relative to 2^64,
        // so the bias is far below anything observable.
        return next_u64() % n;
    }

    bool next_bool() { return (next_u64() & 1ull) != 0; }

    // Standard normal via Box-Muller; the second deviate is cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace lvggm
