#pragma once

// Degree laws with size-biasing and the edge-weight families used throughout:
// a weight is zero with probability equal to the atom at zero (the critical
// bond-percolation probability in critical mode) and otherwise follows a
// strictly positive law with exact cdf / quantile / sampler.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfpp/rng.hpp"

namespace cfpp {

constexpr double kExactTol = 1e-12;

// ---------------------------------------------------------------------------
// Degree model
// ---------------------------------------------------------------------------

// Finitely supported degree pmf p with derived size-biased pmf q, mean mu,
// size-biased mean nu and critical retention probability p_c = 1/nu.
class DegreeModel {
public:
    // pmf given as (degree, probability) pairs. Requires p_0 = p_1 = 0,
    // p_2 < 1 and a valid probability vector.
    explicit DegreeModel(const std::map<int, double>& pmf, double tail_exponent = 0.0)
        : tail_exponent_(tail_exponent) {
        if (pmf.empty()) throw std::invalid_argument("empty degree pmf");
        const int kmax = pmf.rbegin()->first;
        if (kmax < 2) throw std::invalid_argument("degree support must reach 2");
        pmf_.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
        double total = 0.0;
        for (auto [k, p] : pmf) {
            if (k < 0) throw std::invalid_argument("negative degree");
            if (p < 0.0) throw std::invalid_argument("negative probability");
            pmf_[static_cast<std::size_t>(k)] = p;
            total += p;
        }
        if (std::abs(total - 1.0) > kExactTol)
            throw std::invalid_argument("degree pmf must sum to 1");
        if (pmf_[0] != 0.0 || pmf_[1] != 0.0)
            throw std::invalid_argument("degrees below 2 must have zero mass");
        if (pmf_[2] >= 1.0 - kExactTol && kmax == 2)
            throw std::invalid_argument("degree pmf concentrated on 2");

        double mu = 0.0, second_factorial = 0.0;
        for (std::size_t k = 0; k < pmf_.size(); ++k) {
            mu += static_cast<double>(k) * pmf_[k];
            second_factorial += static_cast<double>(k) * (static_cast<double>(k) - 1.0) * pmf_[k];
        }
        if (mu <= 0.0) throw std::invalid_argument("degenerate degree mean");
        mu_ = mu;
        nu_ = second_factorial / mu;
        if (nu_ <= 1.0) throw std::invalid_argument("size-biased mean must exceed 1");
        pc_ = 1.0 / nu_;

        // q_k = (k+1) p_{k+1} / mu
        size_biased_.assign(pmf_.size() - 1, 0.0);
        for (std::size_t k = 0; k + 1 < pmf_.size(); ++k)
            size_biased_[k] = static_cast<double>(k + 1) * pmf_[k + 1] / mu_;
        double qsum = 0.0;
        for (double q : size_biased_) qsum += q;
        if (std::abs(qsum - 1.0) > kExactTol)
            throw std::logic_error("size-biased pmf does not normalize");

        degree_sampler_ = DiscreteSampler(pmf_);
        forward_sampler_ = DiscreteSampler(size_biased_);
    }

    const std::vector<double>& pmf() const { return pmf_; }
    const std::vector<double>& size_biased() const { return size_biased_; }
    double mu() const { return mu_; }
    double nu() const { return nu_; }
    double p_c() const { return pc_; }
    double tail_exponent() const { return tail_exponent_; }
    int max_degree() const { return static_cast<int>(pmf_.size()) - 1; }

    int sample_degree(Rng& rng) const { return static_cast<int>(degree_sampler_(rng)); }
    int sample_forward_degree(Rng& rng) const { return static_cast<int>(forward_sampler_(rng)); }

private:
    std::vector<double> pmf_;
    std::vector<double> size_biased_;
    double mu_ = 0.0, nu_ = 0.0, pc_ = 0.0;
    double tail_exponent_ = 0.0;
    DiscreteSampler degree_sampler_, forward_sampler_;
};

// Standalone size-biasing, usable on raw pmf vectors.
inline std::vector<double> derive_size_biased(const std::vector<double>& pmf) {
    double mu = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k)
        mu += static_cast<double>(k) * pmf[k];
    if (mu <= 0.0) throw std::invalid_argument("degenerate mean, cannot size-bias");
    std::vector<double> q(pmf.size() > 0 ? pmf.size() - 1 : 0, 0.0);
    for (std::size_t k = 0; k + 1 < pmf.size(); ++k)
        q[k] = static_cast<double>(k + 1) * pmf[k + 1] / mu;
    return q;
}

// ---------------------------------------------------------------------------
// Positive weight laws
// ---------------------------------------------------------------------------

enum class PositiveFamily {
    PowerNearZero,  // F_+(x) = x^a / (1-atom) on [0, (1-atom)^{1/a}]
    ExpStretch,     // F_+(x) = exp(-1/x^b) / (1-atom) up to its cap
    DoubleExp,      // F_+(t) = e*exp(-exp(1/t^gamma)) on (0,1], point mass at 1
    Exponential,    // rate-parameter exponential
    PointMass,      // degenerate at c > 0
    Empirical,      // sorted samples, interpolated order-statistic quantile
};

// Law of the strictly positive weight part. The power and stretched
// exponential families are tied to the zero atom of the paired weight model,
// so the atom is part of the construction.
class PositiveLaw {
public:
    static PositiveLaw power_near_zero(double a, double atom) {
        require_atom(atom);
        if (a <= 0.0) throw std::invalid_argument("power exponent must be positive");
        PositiveLaw law(PositiveFamily::PowerNearZero, a, atom);
        law.cap_ = std::pow(1.0 - atom, 1.0 / a);
        return law;
    }
    static PositiveLaw exp_stretch(double b, double atom) {
        require_atom(atom);
        if (b <= 0.0) throw std::invalid_argument("stretch exponent must be positive");
        PositiveLaw law(PositiveFamily::ExpStretch, b, atom);
        law.cap_ = std::pow(-std::log(1.0 - atom), -1.0 / b);
        return law;
    }
    static PositiveLaw double_exp(double gamma) {
        if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
        PositiveLaw law(PositiveFamily::DoubleExp, gamma, 0.0);
        law.cap_ = 1.0;
        return law;
    }
    static PositiveLaw exponential(double rate) {
        if (rate <= 0.0) throw std::invalid_argument("rate must be positive");
        return PositiveLaw(PositiveFamily::Exponential, rate, 0.0);
    }
    static PositiveLaw point_mass(double c) {
        if (c <= 0.0) throw std::invalid_argument("point mass must be strictly positive");
        PositiveLaw law(PositiveFamily::PointMass, c, 0.0);
        law.cap_ = c;
        return law;
    }
    static PositiveLaw empirical(std::vector<double> samples) {
        if (samples.empty()) throw std::invalid_argument("empirical law needs samples");
        std::sort(samples.begin(), samples.end());
        if (samples.front() < 0.0) throw std::invalid_argument("negative weight sample");
        PositiveLaw law(PositiveFamily::Empirical, 0.0, 0.0);
        law.samples_ = std::move(samples);
        law.cap_ = law.samples_.back();
        return law;
    }

    PositiveFamily family() const { return family_; }
    double param() const { return param_; }
    double cap() const { return cap_; }
    const std::vector<double>& samples() const { return samples_; }

    double cdf(double x) const {
        if (x < 0.0) return 0.0;
        switch (family_) {
            case PositiveFamily::PowerNearZero:
                return std::min(std::pow(x, param_) / (1.0 - atom_), 1.0);
            case PositiveFamily::ExpStretch:
                if (x == 0.0) return 0.0;
                return std::min(std::exp(-std::pow(x, -param_)) / (1.0 - atom_), 1.0);
            case PositiveFamily::DoubleExp:
                if (x == 0.0) return 0.0;
                if (x >= 1.0) return 1.0;
                return std::exp(1.0) * std::exp(-std::exp(std::pow(x, -param_)));
            case PositiveFamily::Exponential:
                return -std::expm1(-param_ * x);
            case PositiveFamily::PointMass:
                return x >= param_ ? 1.0 : 0.0;
            case PositiveFamily::Empirical: {
                const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
                return static_cast<double>(it - samples_.begin()) /
                       static_cast<double>(samples_.size());
            }
        }
        return 0.0;
    }

    // Generalized (left-continuous) inverse of the cdf, y in (0,1).
    double quantile(double y) const {
        if (!(y > 0.0 && y < 1.0))
            throw std::domain_error("quantile argument must lie in (0,1)");
        return quantile_log(std::log(y));
    }

    // Quantile evaluated at y = exp(log_y); keeps precision for the extreme
    // left tail where y itself underflows (the min-summability integral needs
    // values down to y = exp(-1e12)).
    double quantile_log(double log_y) const {
        switch (family_) {
            case PositiveFamily::PowerNearZero:
                // x = ((1-atom) y)^{1/a}
                return std::exp((std::log(1.0 - atom_) + log_y) / param_);
            case PositiveFamily::ExpStretch:
                // exp(-1/x^b) = (1-atom) y
                return std::pow(-(std::log(1.0 - atom_) + log_y), -1.0 / param_);
            case PositiveFamily::DoubleExp: {
                // e*exp(-exp(1/t^g)) = y  =>  t = (log(1 - log y))^{-1/g}
                if (log_y >= 1.0 - std::exp(1.0)) return 1.0;  // y above H(1): mass at 1
                return std::pow(std::log(1.0 - log_y), -1.0 / param_);
            }
            case PositiveFamily::Exponential: {
                const double y = std::exp(log_y);
                return -std::log1p(-y) / param_;
            }
            case PositiveFamily::PointMass:
                return param_;
            case PositiveFamily::Empirical: {
                // Order statistic with linear interpolation (diagnostic use).
                const double y = std::exp(log_y);
                const double pos = y * static_cast<double>(samples_.size() - 1);
                const auto lo = static_cast<std::size_t>(pos);
                if (lo + 1 >= samples_.size()) return samples_.back();
                const double frac = pos - static_cast<double>(lo);
                return samples_[lo] + frac * (samples_[lo + 1] - samples_[lo]);
            }
        }
        return 0.0;
    }

    double sample(Rng& rng) const { return quantile(rng.uniform01()); }

    std::string family_name() const {
        switch (family_) {
            case PositiveFamily::PowerNearZero: return "power_near_zero";
            case PositiveFamily::ExpStretch: return "exp_stretch";
            case PositiveFamily::DoubleExp: return "double_exp";
            case PositiveFamily::Exponential: return "exponential";
            case PositiveFamily::PointMass: return "point_mass";
            case PositiveFamily::Empirical: return "empirical";
        }
        return "?";
    }

private:
    PositiveLaw(PositiveFamily f, double param, double atom)
        : family_(f), param_(param), atom_(atom) {}

    static void require_atom(double atom) {
        if (!(atom >= 0.0 && atom < 1.0))
            throw std::invalid_argument("zero atom must lie in [0,1)");
    }

    PositiveFamily family_;
    double param_;
    double atom_;  // zero atom of the paired weight model, for tied families
    double cap_ = std::numeric_limits<double>::infinity();
    std::vector<double> samples_;
};

// ---------------------------------------------------------------------------
// Weight model: atom at zero plus positive part
// ---------------------------------------------------------------------------

class WeightModel {
public:
    WeightModel(double atom_at_zero, PositiveLaw positive)
        : atom_(atom_at_zero), positive_(std::move(positive)) {
        if (!(atom_ >= 0.0 && atom_ <= 1.0))
            throw std::invalid_argument("atom at zero must lie in [0,1]");
    }

    double atom_at_zero() const { return atom_; }
    const PositiveLaw& positive_part() const { return positive_; }

    // F(t) = atom + (1-atom) F_+(t) for t >= 0.
    double cdf(double t) const {
        if (t < 0.0) return 0.0;
        return atom_ + (1.0 - atom_) * positive_.cdf(t);
    }

    // Generalized inverse of the full cdf.
    double quantile(double y) const {
        if (!(y > 0.0 && y < 1.0))
            throw std::domain_error("quantile argument must lie in (0,1)");
        if (y <= atom_) return 0.0;
        return positive_.quantile((y - atom_) / (1.0 - atom_));
    }

    double quantile_positive(double y) const { return positive_.quantile(y); }

    double sample(Rng& rng) const {
        if (atom_ >= 1.0) return 0.0;
        if (atom_ > 0.0 && rng.uniform01() < atom_) return 0.0;
        return positive_.sample(rng);
    }

private:
    double atom_;
    PositiveLaw positive_;
};

} // namespace cfpp
