#pragma once

/**
 * @file oracles.hpp
 * @brief Brute-force reference computations used to check the library. They share no code with it
 *        beyond the GMP types: word enumeration instead of staged convolution, all-pairs instead of
 *        sorted gaps, direct bisection instead of the closed form, and so on.
 */

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

/// Exact element a + b√5 of Q(√5), enough for the golden-ratio examples.
struct Q5 {
    mpq_class a, b;
    friend Q5 operator+(const Q5& x, const Q5& y) { return {x.a + y.a, x.b + y.b}; }
    friend Q5 operator-(const Q5& x, const Q5& y) { return {x.a - y.a, x.b - y.b}; }
    friend Q5 operator*(const Q5& x, const Q5& y) { return {x.a * y.a + 5 * x.b * y.b, x.a * y.b + x.b * y.a}; }
    friend bool operator<(const Q5& x, const Q5& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; }
    bool zero() const { return a == 0 && b == 0; }
    double value() const { return a.get_d() + b.get_d() * std::sqrt(5.0); }
};

inline Q5 golden() { return {mpq_class(-1, 2), mpq_class(1, 2)}; }

/// Atoms of Σ_j t_{i_j} λ^j over all words of length n, keyed by exact position.
template <class T>
std::map<T, mpq_class> word_atoms(const T& lambda, const std::vector<T>& t, const std::vector<mpq_class>& p, int n) {
    std::map<T, mpq_class> out;
    std::size_t letters = t.size(), total = 1;
    for (int j = 0; j < n; ++j) total *= letters;
    std::vector<T> powers{T(1)};
    for (int j = 1; j < n; ++j) powers.push_back(powers.back() * lambda);
    for (std::size_t w = 0; w < total; ++w) {
        std::size_t rest = w;
        T x = t[0] * T(0);
        mpq_class mass = 1;
        for (int j = 0; j < n; ++j) {
            std::size_t i = rest % letters;
            rest /= letters;
            x = x + t[i] * powers[j];
            mass *= p[i];
        }
        out[x] += mass;
    }
    return out;
}

inline std::map<Q5, mpq_class> golden_atoms(int n) {
    return word_atoms<Q5>(golden(), {Q5{0, 0}, Q5{1, 0}}, {mpq_class(1, 2), mpq_class(1, 2)}, n);
}

inline std::map<mpq_class, mpq_class> rational_atoms(const mpq_class& lambda, const std::vector<mpq_class>& t,
                                                     const std::vector<mpq_class>& p, int n) {
    return word_atoms<mpq_class>(lambda, t, p, n);
}

template <class Map>
mpq_class sum_of_squares(const Map& atoms) {
    mpq_class s = 0;
    for (const auto& [x, m] : atoms) s += m * m;
    return s;
}

template <class Map>
double entropy_bits(const Map& atoms) {
    double h = 0;
    for (const auto& [x, m] : atoms) h -= m.get_d() * std::log2(m.get_d());
    return h;
}

/// Γ_k for a rational homogeneous system by comparing every pair of level-k translations.
inline mpq_class all_pairs_gamma(const mpq_class& lambda, const std::vector<mpq_class>& t, int k) {
    std::vector<mpq_class> xs;
    std::size_t letters = t.size(), total = 1;
    for (int j = 0; j < k; ++j) total *= letters;
    for (std::size_t w = 0; w < total; ++w) {
        std::size_t rest = w;
        mpq_class x = 0, power = 1;
        for (int j = 0; j < k; ++j) {
            x += t[rest % letters] * power;
            rest /= letters;
            power *= lambda;
        }
        xs.push_back(x);
    }
    mpq_class best = 1;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            mpq_class d = abs(xs[i] - xs[j]);
            if (d < best) best = d;
        }
    return best;
}

/// T with Σ p_i^q |λ_i|^{-T} = 1 by plain bisection on [0, 40].
inline double bisect_T(const std::vector<double>& p, const std::vector<double>& lambda, double q) {
    auto f = [&](long double T) {
        long double s = 0;
        for (std::size_t i = 0; i < p.size(); ++i) s += std::pow((long double)p[i], (long double)q) * std::pow((long double)std::fabs(lambda[i]), -T);
        return s - 1;
    };
    long double lo = 0, hi = 40;
    for (int it = 0; it < 200; ++it) {
        long double mid = (lo + hi) / 2;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return static_cast<double>((lo + hi) / 2);
}

/// Σ over level-m dyadic bins of (bin mass)^q, binning by exact floor.
inline double dyadic_moment(const std::map<mpq_class, mpq_class>& atoms, int m, double q) {
    std::map<mpz_class, mpq_class> bins;
    for (const auto& [x, mass] : atoms) {
        mpq_class y = x * (mpz_class(1) << m);
        mpz_class j;
        mpz_fdiv_q(j.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
        bins[j] += mass;
    }
    long double s = 0;
    for (const auto& [j, mass] : bins) s += std::pow((long double)mass.get_d(), (long double)q);
    return static_cast<double>(s);
}

/// Full convolution of two dense grid vectors.
inline std::vector<double> dense_convolution(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline double power_sum(const std::vector<double>& a, double q) {
    long double s = 0;
    for (double x : a)
        if (x > 0) s += std::pow((long double)x, (long double)q);
    return static_cast<double>(s);
}

/// Points Σ d_j p^{-j}, j = 1..n, of the level-n p-adic Cantor set.
inline std::vector<double> cantor_level(int p, const std::vector<int>& digits, int n) {
    std::vector<double> pts{0.0};
    double scale = 1;
    for (int j = 0; j < n; ++j) {
        scale /= p;
        std::vector<double> next;
        for (double x : pts)
            for (int d : digits) next.push_back(x + d * scale);
        pts.swap(next);
    }
    return pts;
}

} // namespace oracle
