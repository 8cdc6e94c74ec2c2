#pragma once

// Seeded, splittable random number generation. Every stream is fully
// determined by (seed, stream-id), independent of thread scheduling, and all
// samplers below are implemented in-library so that output is bit-identical
// across platforms and standard-library versions.

#include <cstdint>
#include <vector>
#include <stdexcept>
#include <cmath>

namespace cfpp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ seeded from (seed, stream) through splitmix64.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t sm = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1); never returns an endpoint, so it is
    // safe to feed into quantile functions.
    double uniform01() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // Lemire rejection sampling, unbiased.
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0ULL - bound) % bound;
            while (lo < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Binomial(trials, p) by direct Bernoulli counting; trial counts here are
    // degree-sized, so this is both fast and reproducible.
    std::uint32_t binomial(std::uint32_t trials, double p) {
        std::uint32_t successes = 0;
        for (std::uint32_t i = 0; i < trials; ++i)
            if (uniform01() < p) ++successes;
        return successes;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

// Inverse-cdf sampler for a pmf on {0,1,...,K}.
class DiscreteSampler {
public:
    DiscreteSampler() = default;

    explicit DiscreteSampler(const std::vector<double>& pmf) : cdf_(pmf) {
        double acc = 0.0;
        for (auto& c : cdf_) {
            if (c < 0.0) throw std::invalid_argument("pmf entries must be nonnegative");
            acc += c;
            c = acc;
        }
        if (cdf_.empty() || std::abs(acc - 1.0) > 1e-9)
            throw std::invalid_argument("pmf must sum to 1");
        cdf_.back() = 1.0;
    }

    std::uint32_t operator()(Rng& rng) const {
        const double u = rng.uniform01();
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf_[mid] < u) lo = mid + 1; else hi = mid;
        }
        return static_cast<std::uint32_t>(lo);
    }

private:
    std::vector<double> cdf_;
};

} // namespace cfpp
