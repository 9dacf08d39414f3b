#pragma once

/**
 * @file numeric.hpp
 * @brief Small floating point helpers: compensated sums, power sums, logs of big rationals, fits.
 */

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "lqdim/scalar.hpp"

namespace lqdim {

/// Neumaier compensated accumulator in extended precision.
class CompensatedSum {
public:
    void add(long double x) {
        long double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    long double value() const { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

/// log2 of a positive rational without overflow for huge numerators/denominators.
inline long double log2_rational(const Rational& q) {
    if (sgn(q) <= 0) fail(ErrorKind::domain, "log of a non-positive rational");
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
    return std::log2l(static_cast<long double>(mn)) - std::log2l(static_cast<long double>(md)) +
           static_cast<long double>(en - ed);
}

/**
 * Σ x_i^q for positive x_i, summed smallest-first so the small-mass tail is
 * not swamped. Works in log space so tiny masses raised to large q stay finite
 * relative to each other; returns log2 of the sum.
 */
inline long double log2_power_sum_from_logs(std::vector<long double> log2_terms) {
    if (log2_terms.empty()) return -std::numeric_limits<long double>::infinity();
    std::sort(log2_terms.begin(), log2_terms.end());
    long double top = log2_terms.back();
    CompensatedSum s;
    for (long double l : log2_terms) s.add(std::exp2l(l - top));
    return top + std::log2l(s.value());
}

inline long double log2_power_sum(std::span<const double> masses, double q) {
    std::vector<long double> logs;
    logs.reserve(masses.size());
    for (double m : masses)
        if (m > 0) logs.push_back(static_cast<long double>(q) * std::log2l(static_cast<long double>(m)));
    return log2_power_sum_from_logs(std::move(logs));
}

inline long double log2_power_sum(std::span<const Rational> masses, double q) {
    std::vector<long double> logs;
    logs.reserve(masses.size());
    for (const Rational& m : masses) logs.push_back(static_cast<long double>(q) * log2_rational(m));
    return log2_power_sum_from_logs(std::move(logs));
}

/// Σ x_i^q exactly for integer q.
inline Rational exact_power_sum(std::span<const Rational> masses, unsigned q) {
    Rational total(0);
    Rational p;
    for (const Rational& m : masses) {
        mpz_pow_ui(p.get_num_mpz_t(), m.get_num_mpz_t(), q);
        mpz_pow_ui(p.get_den_mpz_t(), m.get_den_mpz_t(), q);
        total += p;
    }
    return total;
}

/// True when q is a positive integer small enough for exact powering.
inline bool is_small_integer(double q, unsigned limit = 64) {
    return q >= 1 && q <= limit && std::floor(q) == q;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; ///< root mean square residual
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) fail(ErrorKind::domain, "least squares needs matching non-empty samples");
    const double n = static_cast<double>(x.size());
    if (x.size() == 1) return {y[0] / (x[0] == 0 ? 1.0 : x[0]), 0.0, 0.0};
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxx == 0 ? 0.0 : sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

} // namespace lqdim
