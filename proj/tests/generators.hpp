#pragma once

/**
 * @file generators.hpp
 * @brief Seeded random generators for the property tests.
 */

#include <random>
#include <vector>

#include "lqdim/measure.hpp"
#include "lqdim/wifs.hpp"

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    bool coin() { return integer(0, 1) == 1; }

    lqdim::Rational rational(long max_num = 50, long max_den = 50) {
        return lqdim::make_rational(integer(-max_num, max_num), integer(1, max_den));
    }

    /// Random element of Q(√d), or a plain rational when d = 0.
    lqdim::Scalar scalar(long d) {
        if (d == 0) return lqdim::Scalar(rational());
        return lqdim::Scalar::quadratic(rational(), rational(), d);
    }

    /// A probability vector of k exact rationals with small denominators.
    std::vector<lqdim::Rational> weights(std::size_t k) {
        std::vector<long> raw(k);
        long total = 0;
        for (auto& r : raw) total += (r = integer(1, 9));
        std::vector<lqdim::Rational> p;
        for (long r : raw) p.push_back(lqdim::make_rational(r, total));
        return p;
    }

    /// Homogeneous rational system with ratio in (-1, 1) and translations in [0, 1].
    lqdim::Wifs homogeneous_wifs(std::size_t k_min = 2, std::size_t k_max = 4, bool allow_negative = true) {
        std::size_t k = static_cast<std::size_t>(integer(static_cast<long>(k_min), static_cast<long>(k_max)));
        long den = integer(2, 7);
        long num = integer(1, den - 1);
        if (allow_negative && coin()) num = -num;
        lqdim::Scalar lambda(lqdim::make_rational(num, den));
        lqdim::Wifs w;
        for (std::size_t i = 0; i < k; ++i)
            w.maps.push_back({lambda, lqdim::Scalar(lqdim::make_rational(integer(0, 8), 8))});
        w.weights = weights(k);
        return w;
    }

    /// Arbitrary valid system, ratios possibly distinct and possibly float.
    lqdim::Wifs any_wifs(bool allow_float = true) {
        std::size_t k = static_cast<std::size_t>(integer(2, 4));
        lqdim::Wifs w;
        for (std::size_t i = 0; i < k; ++i) {
            lqdim::Scalar lambda = allow_float && coin() ? lqdim::Scalar::floating(real(-0.95, 0.95))
                                                         : lqdim::Scalar(lqdim::make_rational(integer(-9, 9), 10));
            if (lambda.is_zero()) lambda = lqdim::Scalar(lqdim::make_rational(1, 3));
            w.maps.push_back({lambda, lqdim::Scalar(rational(5, 5))});
        }
        w.weights = weights(k);
        return w;
    }

    /// Exact probability measure with up to n atoms at rational positions in [0, 2).
    lqdim::DiscreteMeasure measure(std::size_t n, long den = 16) {
        std::vector<lqdim::Atom> atoms;
        auto p = weights(n);
        for (std::size_t i = 0; i < n; ++i)
            atoms.push_back({lqdim::Scalar(lqdim::make_rational(integer(0, 2 * den - 1), den)), p[i]});
        return lqdim::DiscreteMeasure::from_atoms(std::move(atoms));
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace gen
