#pragma once

// Statistics used by the experiment harness: two-sample Kolmogorov-Smirnov,
// total-variation distance, log-log survival-slope fits with bootstrap CIs,
// and summary aggregates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "cfpp/rng.hpp"

namespace cfpp {

// Two-sample KS statistic: sup_x |F1(x) - F2(x)| over the merged support.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

// 0.5 * sum |p_k - q_k| over the union of supports.
inline double tv_distance(const std::vector<double>& p,
                          const std::vector<double>& q) {
    double acc = 0.0;
    const std::size_t n = std::max(p.size(), q.size());
    for (std::size_t k = 0; k < n; ++k) {
        const double pk = k < p.size() ? p[k] : 0.0;
        const double qk = k < q.size() ? q[k] : 0.0;
        acc += std::abs(pk - qk);
    }
    return 0.5 * acc;
}

inline double tv_distance(const std::map<std::int64_t, double>& p,
                          const std::map<std::int64_t, double>& q) {
    double acc = 0.0;
    auto it = p.begin();
    auto jt = q.begin();
    while (it != p.end() || jt != q.end()) {
        if (jt == q.end() || (it != p.end() && it->first < jt->first)) {
            acc += std::abs(it->second);
            ++it;
        } else if (it == p.end() || jt->first < it->first) {
            acc += std::abs(jt->second);
            ++jt;
        } else {
            acc += std::abs(it->second - jt->second);
            ++it;
            ++jt;
        }
    }
    return 0.5 * acc;
}

struct SurvivalPoint {
    double m = 0.0;         // threshold
    double survival = 0.0;  // P(X >= m)
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_low = 0.0;   // bootstrap percentile CI on the slope
    double ci_high = 0.0;
};

namespace detail {

inline std::pair<double, double> least_squares(const std::vector<double>& x,
                                               const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::runtime_error("degenerate slope fit");
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

} // namespace detail

// Least-squares slope of log-survival against log-m, with a percentile
// bootstrap CI over point resampling. Nonpositive survival values are
// filtered; fewer than 5 surviving points is an error.
inline SlopeFit fit_tail_slope(const std::vector<SurvivalPoint>& points,
                               int bootstrap = 1000,
                               std::uint64_t seed = 0x5eedULL) {
    std::vector<double> lx, ly;
    for (const auto& p : points) {
        if (p.survival <= 0.0 || p.m <= 0.0) continue;
        lx.push_back(std::log(p.m));
        ly.push_back(std::log(p.survival));
    }
    if (lx.size() < 5)
        throw std::runtime_error("too few positive survival points for a fit");

    SlopeFit fit;
    const auto [slope, intercept] = detail::least_squares(lx, ly);
    fit.slope = slope;
    fit.intercept = intercept;

    Rng rng(seed);
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(bootstrap));
    std::vector<double> bx(lx.size()), by(ly.size());
    for (int b = 0; b < bootstrap; ++b) {
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const auto j = static_cast<std::size_t>(rng.below(lx.size()));
            bx[i] = lx[j];
            by[i] = ly[j];
        }
        try {
            slopes.push_back(detail::least_squares(bx, by).first);
        } catch (const std::runtime_error&) {
            // all-identical resample; skip
        }
    }
    std::sort(slopes.begin(), slopes.end());
    if (!slopes.empty()) {
        fit.ci_low = slopes[static_cast<std::size_t>(0.025 * static_cast<double>(slopes.size()))];
        fit.ci_high = slopes[std::min(slopes.size() - 1,
                                      static_cast<std::size_t>(0.975 * static_cast<double>(slopes.size())))];
    }
    return fit;
}

// Survival points of an empirical sample at given thresholds. Capped
// observations still count toward P(X >= m) for m below the cap.
inline std::vector<SurvivalPoint> survival_points(
    const std::vector<std::uint64_t>& samples,
    const std::vector<std::uint64_t>& thresholds) {
    std::vector<std::uint64_t> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    std::vector<SurvivalPoint> out;
    out.reserve(thresholds.size());
    const double n = static_cast<double>(sorted.size());
    for (auto m : thresholds) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), m);
        out.push_back(SurvivalPoint{
            static_cast<double>(m),
            static_cast<double>(sorted.end() - it) / n});
    }
    return out;
}

// Logarithmically spaced integer thresholds in [lo, hi].
inline std::vector<std::uint64_t> log_spaced(std::uint64_t lo, std::uint64_t hi,
                                             int count) {
    std::vector<std::uint64_t> out;
    const double llo = std::log(static_cast<double>(lo));
    const double lhi = std::log(static_cast<double>(hi));
    std::uint64_t prev = 0;
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        const auto m = static_cast<std::uint64_t>(
            std::llround(std::exp(llo + f * (lhi - llo))));
        if (m != prev) out.push_back(m);
        prev = m;
    }
    return out;
}

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += v;
    s.mean = acc / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    if (values.size() > 1)
        s.stderr_mean = std::sqrt(var / static_cast<double>(values.size() - 1) /
                                  static_cast<double>(values.size()));
    s.median = quantile_sorted(values, 0.5);
    s.q25 = quantile_sorted(values, 0.25);
    s.q75 = quantile_sorted(values, 0.75);
    return s;
}

} // namespace cfpp
