#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace ccopt {

// splitmix64 step (Steele, Lea & Flood 2014). The increment is the golden
// ratio in 64-bit fixed point; the finalizer is Stafford's mix13.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Small deterministic generator. Streams are derived by hashing a key path
// into the seed, so (seed, keys...) fully identifies the stream and distinct
// key paths give statistically independent sequences.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // burn-in decorrelates trivially related seeds
        std::uint64_t s = state_;
        state_ = splitmix64_next(s);
    }

    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) : Rng(seed) {
        for (std::uint64_t k : keys) mix_key(k);
    }

    // folds one more key into the stream identity; order matters
    void mix_key(std::uint64_t k) {
        std::uint64_t h = k + 0x632be59bd9b4e019ULL;
        state_ ^= splitmix64_next(h);
        std::uint64_t s = state_;
        state_ = splitmix64_next(s);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform on [0,1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; the pair's second member is cached
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // circularly-symmetric complex normal, zero mean, unit variance:
    // E[|z|^2] = 1, so each component has variance 1/2
    std::complex<double> next_cnormal() {
        const double re = next_normal();
        const double im = next_normal();
        return {re * 0.70710678118654752440, im * 0.70710678118654752440};
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace ccopt
