#pragma once

// Binomial confidence intervals and chi-square goodness of fit.

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace spsing {

struct Interval {
    double low = 0.0;
    double high = 1.0;

    double halfwidth() const noexcept { return 0.5 * (high - low); }
    bool contains(double x) const noexcept { return low <= x && x <= high; }
};

/// Exact two-sided Clopper-Pearson interval for `successes` out of `trials`.
inline Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99) {
    if (trials == 0) return {0.0, 1.0};
    const double alpha = 1.0 - confidence;
    const auto x = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    Interval out;
    out.low = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(x, n - x + 1), alpha / 2);
    out.high = successes == trials
                   ? 1.0
                   : boost::math::quantile(boost::math::beta_distribution<>(x + 1, n - x), 1 - alpha / 2);
    return out;
}

/// Binomial standard error sqrt(f(1-f)/N) of an observed fraction.
inline double binomial_sigma(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return 0.0;
    const double f = static_cast<double>(successes) / static_cast<double>(trials);
    return std::sqrt(f * (1 - f) / static_cast<double>(trials));
}

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Pearson chi-square against the uniform law over counts.size() cells.
inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw std::invalid_argument("need at least two cells");
    double total = 0;
    for (auto c : counts) total += static_cast<double>(c);
    const double expected = total / static_cast<double>(counts.size());
    ChiSquareResult out;
    for (auto c : counts) {
        const double diff = static_cast<double>(c) - expected;
        out.statistic += diff * diff / expected;
    }
    out.degrees_of_freedom = counts.size() - 1;
    boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

}  // namespace spsing
