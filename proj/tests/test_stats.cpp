#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "cfpp/rng.hpp"
#include "cfpp/stats.hpp"

using namespace cfpp;

TEST_CASE("two-sample KS extremes") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    REQUIRE(ks_two_sample(a, a) == 0.0);
    std::vector<double> shifted;
    for (double x : a) shifted.push_back(x + 10.0);
    REQUIRE(ks_two_sample(a, shifted) == 1.0);
    REQUIRE_THROWS(ks_two_sample({}, a));
}

TEST_CASE("KS of a half-shifted sample") {
    // {1,2} vs {2,3}: sup gap is 1/2 just below 2 (and at 2 with <= ties).
    REQUIRE(ks_two_sample({1.0, 2.0}, {2.0, 3.0}) ==
            Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("total variation distance") {
    const std::vector<double> p{0.5, 0.5};
    REQUIRE(tv_distance(p, p) == 0.0);
    REQUIRE(tv_distance(std::vector<double>{1.0, 0.0},
                        std::vector<double>{0.0, 1.0}) == 1.0);
    REQUIRE(tv_distance(std::vector<double>{0.5, 0.5},
                        std::vector<double>{0.75, 0.25}) ==
            Catch::Approx(0.25).margin(1e-12));
    // map overload with disjoint and overlapping support
    const std::map<std::int64_t, double> m1{{0, 0.5}, {2, 0.5}};
    const std::map<std::int64_t, double> m2{{0, 0.75}, {3, 0.25}};
    REQUIRE(tv_distance(m1, m2) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(tv_distance(m1, m1) == 0.0);
}

TEST_CASE("exact power-law survival points recover their slopes") {
    std::vector<SurvivalPoint> half, three_halves;
    for (double m : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
        half.push_back({m, std::pow(m, -0.5)});
        three_halves.push_back({m, std::pow(m, -1.5)});
    }
    REQUIRE(fit_tail_slope(half).slope == Catch::Approx(-0.5).margin(1e-9));
    REQUIRE(fit_tail_slope(three_halves).slope ==
            Catch::Approx(-1.5).margin(1e-9));
    const auto fit = fit_tail_slope(half);
    REQUIRE(fit.ci_low <= fit.slope);
    REQUIRE(fit.ci_high >= fit.slope);
}

TEST_CASE("slope estimation on synthetic heavy-tailed samples") {
    // X = u^{-2} has P(X >= m) = m^{-1/2}.
    Rng rng(99);
    std::vector<std::uint64_t> samples;
    const int n = 1000000;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        const double x = std::min(1.0 / (u * u), 1e12);
        samples.push_back(static_cast<std::uint64_t>(x));
    }
    const auto thresholds = log_spaced(8, 4096, 20);
    const auto pts = survival_points(samples, thresholds);
    const auto fit = fit_tail_slope(pts, 500, 7);
    REQUIRE(std::abs(fit.slope + 0.5) < 0.05);
}

TEST_CASE("too few usable points is an error") {
    std::vector<SurvivalPoint> pts{{1, 0.5}, {2, 0.25}, {4, 0.0}, {8, 0.0}};
    REQUIRE_THROWS(fit_tail_slope(pts));
}

TEST_CASE("survival points count capped observations below the cap") {
    const std::vector<std::uint64_t> samples{1, 2, 5, 10, 10, 10};  // cap at 10
    const auto pts = survival_points(samples, {1, 2, 5, 10});
    REQUIRE(pts[0].survival == 1.0);
    REQUIRE(pts[1].survival == Catch::Approx(5.0 / 6.0));
    REQUIRE(pts[2].survival == Catch::Approx(4.0 / 6.0));
    REQUIRE(pts[3].survival == Catch::Approx(3.0 / 6.0));
}

TEST_CASE("log-spaced thresholds are strictly increasing and deduplicated") {
    const auto t = log_spaced(1, 1000, 30);
    REQUIRE(t.front() == 1);
    REQUIRE(t.back() == 1000);
    for (std::size_t i = 1; i < t.size(); ++i) REQUIRE(t[i] > t[i - 1]);
}

TEST_CASE("summary statistics") {
    const Summary s = summarize({4.0, 1.0, 3.0, 2.0, 5.0});
    REQUIRE(s.count == 5);
    REQUIRE(s.mean == Catch::Approx(3.0));
    REQUIRE(s.median == Catch::Approx(3.0));
    REQUIRE(s.q25 == Catch::Approx(2.0));
    REQUIRE(s.q75 == Catch::Approx(4.0));
    REQUIRE(s.stderr_mean ==
            Catch::Approx(std::sqrt(2.5 / 5.0)));  // sd/sqrt(n)
    REQUIRE(summarize({}).count == 0);
    REQUIRE(summarize({7.0}).median == 7.0);
}

TEST_CASE("sorted quantile interpolation") {
    const std::vector<double> v{0.0, 1.0, 2.0, 3.0};
    REQUIRE(quantile_sorted(v, 0.0) == 0.0);
    REQUIRE(quantile_sorted(v, 1.0) == 3.0);
    REQUIRE(quantile_sorted(v, 0.5) == Catch::Approx(1.5));
    REQUIRE_THROWS(quantile_sorted({}, 0.5));
}
