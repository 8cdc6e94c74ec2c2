#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cfpp/rng.hpp"

using cfpp::DiscreteSampler;
using cfpp::Rng;

TEST_CASE("identical (seed, stream) reproduces the sequence") {
    Rng a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
}

TEST_CASE("distinct streams decorrelate") {
    Rng a(42, 0), b(42, 1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) equal += (a() == b());
    REQUIRE(equal == 0);
}

TEST_CASE("uniform01 stays inside the open interval and is centered") {
    Rng rng(1);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // SE of the mean is ~1/sqrt(12 n) ~ 0.0009; allow 5 SE.
    REQUIRE(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("below respects the bound and is unbiased across bins") {
    Rng rng(2);
    const std::uint64_t bound = 10;
    std::vector<int> counts(bound, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const auto x = rng.below(bound);
        REQUIRE(x < bound);
        ++counts[x];
    }
    const double expect = static_cast<double>(n) / static_cast<double>(bound);
    const double se = std::sqrt(expect * (1.0 - 0.1));
    for (auto c : counts) REQUIRE(std::abs(c - expect) < 5.0 * se);
}

TEST_CASE("binomial edge cases and mean") {
    Rng rng(3);
    REQUIRE(rng.binomial(0, 0.5) == 0);
    REQUIRE(rng.binomial(10, 0.0) == 0);
    REQUIRE(rng.binomial(10, 1.0) == 10);
    double sum = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) sum += rng.binomial(10, 0.3);
    // mean 3, SE of the sample mean ~ sqrt(2.1/n) ~ 0.0065; allow 5 SE.
    REQUIRE(std::abs(sum / n - 3.0) < 0.033);
}

TEST_CASE("discrete sampler matches its pmf") {
    DiscreteSampler s(std::vector<double>{0.25, 0.25, 0.5});
    Rng rng(4);
    std::vector<int> counts(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[s(rng)];
    const double probs[] = {0.25, 0.25, 0.5};
    for (int k = 0; k < 3; ++k) {
        const double expect = probs[k] * n;
        const double se = std::sqrt(n * probs[k] * (1 - probs[k]));
        REQUIRE(std::abs(counts[k] - expect) < 5.0 * se);
    }
}

TEST_CASE("discrete sampler rejects malformed pmfs") {
    REQUIRE_THROWS_AS(DiscreteSampler(std::vector<double>{0.5, 0.4}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(DiscreteSampler(std::vector<double>{-0.1, 1.1}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(DiscreteSampler(std::vector<double>{}),
                      std::invalid_argument);
}

TEST_CASE("point mass sampler always returns its atom") {
    DiscreteSampler s(std::vector<double>{0.0, 0.0, 1.0});
    Rng rng(5);
    for (int i = 0; i < 100; ++i) REQUIRE(s(rng) == 2);
}
