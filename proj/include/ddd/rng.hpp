#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>

namespace ddd {

/* Deterministic random stream: xoshiro256++ seeded through splitmix64
 * (both public-domain algorithms by Blackman and Vigna).
 *
 * The standard library's engines are portable but its distributions are
 * implementation-defined, which would break the byte-identical artifact
 * contract across toolchains.  Everything here is pinned: uniform doubles
 * take the top 53 bits, gaussians come from Box-Muller with a cached spare,
 * Poisson uses sequential inversion below mean 50 and a rounded normal
 * approximation above. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /* Uniform in [0, 1). */
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /* Uniform in {0, ..., n-1}, bias-free by rejection. */
    std::uint64_t uniform_int(std::uint64_t n) {
        assert(n > 0);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /* Standard normal. */
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /* Poisson draw with the stated mean. */
    long poisson(double mean) {
        assert(mean >= 0.0);
        if (mean == 0.0) return 0;
        if (mean < 50.0) {
            double p = std::exp(-mean);
            double cum = p;
            const double u = next_double();
            long k = 0;
            while (u > cum && k < 10000) {
                ++k;
                p *= mean / static_cast<double>(k);
                cum += p;
            }
            return k;
        }
        const double z = gaussian();
        const double k = std::llround(mean + std::sqrt(mean) * z);
        return k < 0 ? 0 : static_cast<long>(k);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ddd
