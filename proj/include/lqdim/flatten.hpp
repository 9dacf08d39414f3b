#pragma once

/**
 * @file flatten.hpp
 * @brief 2^-m grid measures, (D, l, R)-regular trees and convolution flattening probes.
 *
 * A GridMeasure of level m lives on {j 2^-m : 0 <= j < 2^m}. Convolutions are
 * taken on the line, so ρ ∗ μ lives on [0, 2) and keeps the level m.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lqdim/histogram.hpp"
#include "lqdim/numeric.hpp"
#include "lqdim/scalar.hpp"

namespace lqdim {

struct GridMeasure {
    int m = 0;
    std::vector<std::uint64_t> index; ///< strictly increasing
    std::vector<double> mass;

    std::size_t size() const { return index.size(); }

    static GridMeasure dirac(int m, std::uint64_t j = 0) { return {m, {j}, {1.0}}; }

    static GridMeasure uniform(int m) {
        if (m < 0 || m > 30) fail(ErrorKind::domain, "uniform grid measure supports 0 <= m <= 30");
        GridMeasure g;
        g.m = m;
        std::uint64_t n = std::uint64_t(1) << m;
        g.index.resize(n);
        for (std::uint64_t j = 0; j < n; ++j) g.index[j] = j;
        g.mass.assign(n, std::ldexp(1.0, -m));
        return g;
    }

    /// a·this + (1 - a)·other, both on the same grid.
    GridMeasure mix(double a, const GridMeasure& other) const {
        if (other.m != m) fail(ErrorKind::domain, "mixing grid measures of different levels");
        std::map<std::uint64_t, double> acc;
        for (std::size_t i = 0; i < size(); ++i) acc[index[i]] += a * mass[i];
        for (std::size_t i = 0; i < other.size(); ++i) acc[other.index[i]] += (1 - a) * other.mass[i];
        GridMeasure g;
        g.m = m;
        for (auto [j, x] : acc)
            if (x > 0) {
                g.index.push_back(j);
                g.mass.push_back(x);
            }
        return g;
    }

    static GridMeasure from_histogram(const DyadicHistogram& h) {
        GridMeasure g;
        g.m = h.level;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h.bins[i] < 0 || h.bins[i] >= (std::int64_t(1) << h.level))
                fail(ErrorKind::domain, "histogram bin outside [0,1)");
            g.index.push_back(static_cast<std::uint64_t>(h.bins[i]));
            g.mass.push_back(h.mass[i]);
        }
        return g;
    }
};

inline long double log2_q_sum(const GridMeasure& g, double q) {
    return log2_power_sum(std::span<const double>(g.mass), q);
}

// ---- regular trees -----------------------------------------------------------

/**
 * Uniform measure on the set whose base-2^D digits X_0 X_1 ... X_{l-1}
 * (most significant first) range over all of [0, 2^D) at levels in S and are
 * 0 elsewhere.
 */
inline GridMeasure build_tree_measure(int D, int ell, const std::set<int>& S) {
    if (D < 1 || ell < 1) fail(ErrorKind::domain, "tree parameters need D >= 1 and l >= 1");
    for (int s : S)
        if (s < 0 || s >= ell) fail(ErrorKind::domain, "branching level " + std::to_string(s) + " outside [0, l)");
    if (D * ell > 62) fail(ErrorKind::resource, "grid level D*l = " + std::to_string(D * ell) + " exceeds 62");
    if (D * static_cast<int>(S.size()) > 26)
        fail(ErrorKind::resource, "tree would have 2^" + std::to_string(D * S.size()) + " atoms, above 2^26");
    GridMeasure g;
    g.m = D * ell;
    std::vector<std::uint64_t> idx{0};
    for (int s = 0; s < ell; ++s) {
        const int shift = D * (ell - 1 - s);
        if (!S.count(s)) continue;
        std::vector<std::uint64_t> next;
        next.reserve(idx.size() << D);
        for (std::uint64_t base : idx)
            for (std::uint64_t x = 0; x < (std::uint64_t(1) << D); ++x) next.push_back(base | (x << shift));
        idx.swap(next);
    }
    std::sort(idx.begin(), idx.end());
    g.index = std::move(idx);
    g.mass.assign(g.index.size(), 1.0 / static_cast<double>(g.index.size()));
    return g;
}

struct IrregularityWitness {
    int level = 0;
    std::uint64_t parent_a = 0, parent_b = 0; ///< level-s parent intervals, as indices on the 2^{-sD} grid
    std::uint64_t children_a = 0, children_b = 0;
};

struct BranchingProfile {
    int D = 0;
    int ell = 0;
    std::vector<std::uint64_t> R;        ///< children per level-s node (0 where irregular)
    bool regular = true;
    std::set<int> branching_set;         ///< levels with R_s > 1
    std::optional<IrregularityWitness> witness;
};

/// Child counts per level of the 2^D-ary tree of a set given by sorted, distinct grid indices.
inline BranchingProfile regularity_check(const std::vector<std::uint64_t>& support, int m, int D) {
    if (D < 1 || m % D != 0) fail(ErrorKind::domain, "grid level m must be a positive multiple of D");
    if (support.empty()) fail(ErrorKind::domain, "empty support");
    BranchingProfile bp;
    bp.D = D;
    bp.ell = m / D;
    for (int s = 0; s < bp.ell; ++s) {
        const int parent_shift = D * (bp.ell - s);
        const int child_shift = D * (bp.ell - s - 1);
        auto prefix = [](std::uint64_t x, int shift) { return shift >= 64 ? std::uint64_t(0) : x >> shift; };
        std::vector<std::pair<std::uint64_t, std::uint64_t>> counts; // (parent, #children)
        std::uint64_t last_child = ~std::uint64_t(0);
        for (std::uint64_t x : support) {
            std::uint64_t parent = prefix(x, parent_shift), child = prefix(x, child_shift);
            if (counts.empty() || counts.back().first != parent) {
                counts.emplace_back(parent, 1);
            } else if (child != last_child) {
                ++counts.back().second;
            }
            last_child = child;
        }
        std::uint64_t r = counts.front().second;
        bool level_regular = true;
        for (const auto& [parent, c] : counts)
            if (c != r) {
                level_regular = false;
                if (!bp.witness) bp.witness = IrregularityWitness{s, counts.front().first, parent, r, c};
                break;
            }
        bp.R.push_back(level_regular ? r : 0);
        if (!level_regular) bp.regular = false;
        if (level_regular && r > 1) bp.branching_set.insert(s);
    }
    return bp;
}

// ---- flattening -------------------------------------------------------------------

struct FlatteningResult {
    double log2_ratio = 0;   ///< log2(‖ρ∗μ‖_q^q / ‖μ‖_q^q)
    double eps_hat = 0;      ///< -log2_ratio / m, exponent of the q-th power ratio
    double eps_hat_norm = 0; ///< eps_hat / q, exponent of the ratio of q-norms
    double rho_norm_dual = 0; ///< ‖ρ‖_q^{q'} with q' = q/(q-1)
    double sigma_hat = 0;    ///< -log2(‖ρ‖_q^{q'}) / m
};

/// ρ ∗ μ on the line, as masses indexed by j in [0, 2^{m+1} - 1).
inline GridMeasure convolve_grid(const GridMeasure& rho, const GridMeasure& mu) {
    if (rho.m != mu.m) fail(ErrorKind::domain, "grid measures of different levels");
    if (rho.m > 26) fail(ErrorKind::resource, "grid convolution supports m <= 26");
    std::vector<double> dense(std::size_t(2) << rho.m, 0.0);
    for (std::size_t a = 0; a < rho.size(); ++a)
        for (std::size_t b = 0; b < mu.size(); ++b) dense[rho.index[a] + mu.index[b]] += rho.mass[a] * mu.mass[b];
    GridMeasure out;
    out.m = rho.m;
    for (std::size_t j = 0; j < dense.size(); ++j)
        if (dense[j] > 0) {
            out.index.push_back(j);
            out.mass.push_back(dense[j]);
        }
    return out;
}

inline FlatteningResult flattening_ratio(const GridMeasure& rho, const GridMeasure& mu, double q) {
    if (!(q > 1)) fail(ErrorKind::domain, "flattening needs q > 1");
    if (rho.m != mu.m) fail(ErrorKind::domain, "flattening needs measures of the same level m");
    if (mu.m < 1) fail(ErrorKind::domain, "flattening needs m >= 1");
    GridMeasure conv = convolve_grid(rho, mu);
    FlatteningResult r;
    r.log2_ratio = static_cast<double>(log2_q_sum(conv, q) - log2_q_sum(mu, q));
    r.eps_hat = r.log2_ratio == 0 ? 0.0 : -r.log2_ratio / mu.m;
    r.eps_hat_norm = r.eps_hat / q;
    long double lr = log2_q_sum(rho, q) / (q - 1);
    r.rho_norm_dual = static_cast<double>(std::exp2l(lr));
    r.sigma_hat = static_cast<double>(-lr / mu.m);
    return r;
}

/// The obstruction measure 2^{-ceil(a m)} δ_0 + (1 - 2^{-ceil(a m)}) uniform.
inline GridMeasure obstruction_measure(int m, double a = 0.1) {
    double eta = std::ldexp(1.0, -static_cast<int>(std::ceil(a * m - 1e-12)));
    return GridMeasure::dirac(m).mix(eta, GridMeasure::uniform(m));
}

// ---- self-convolution of tree measures -----------------------------------------------

struct TreeConvolutionReport {
    double log2_norm_mu = 0;     ///< log2 ‖μ‖_q^q = D|S|(1-q)
    double log2_norm_conv = 0;   ///< log2 ‖μ∗μ‖_q^q
    std::optional<Rational> exact_norm_conv; ///< integer q
    double gap = 0;              ///< |difference| / (D l)
    std::optional<BranchingProfile> conv_branching; ///< supp(μ∗μ) on D(l+1) bits, when small enough
};

namespace detail {

/// Distribution of X + Y for X, Y uniform on [0, B): triangular on [0, 2B-2]; or δ_0.
inline std::vector<Rational> digit_sum_law(std::uint64_t B, bool branching) {
    if (!branching) return {Rational(1)};
    std::vector<Rational> w(2 * B - 1);
    Rational b2(BigInt(B) * BigInt(B));
    for (std::uint64_t k = 0; k < 2 * B - 1; ++k) {
        std::uint64_t c = k < B ? k + 1 : 2 * B - 1 - k;
        w[k] = Rational(BigInt(c)) / b2;
    }
    return w;
}

} // namespace detail

/**
 * ‖μ∗μ‖_q^q for the uniform measure μ on the tree set, without enumerating μ∗μ.
 * The base-2^D digits of Z = X + Y come from digit sums W_s plus carries; for
 * integer q the q-th power sum is a product of transfer matrices over q-tuples
 * of carries. Non-integer q enumerates the distinct sums directly (capped).
 */
inline TreeConvolutionReport tree_self_convolution_check(int D, int ell, const std::set<int>& S, double q,
                                                         std::size_t enumeration_cap = std::size_t(1) << 24) {
    if (!(q > 1)) fail(ErrorKind::domain, "q must exceed 1");
    if (D < 1 || ell < 1 || D > 20) fail(ErrorKind::domain, "tree parameters need 1 <= D <= 20 and l >= 1");
    for (int s : S)
        if (s < 0 || s >= ell) fail(ErrorKind::domain, "branching level outside [0, l)");
    const std::uint64_t B = std::uint64_t(1) << D;
    TreeConvolutionReport rep;
    rep.log2_norm_mu = static_cast<double>(D) * static_cast<double>(S.size()) * (1 - q);

    std::vector<std::vector<Rational>> law(ell);
    for (int s = 0; s < ell; ++s) law[s] = detail::digit_sum_law(B, S.count(s) > 0);

    if (is_small_integer(q, 8)) {
        const unsigned Q = static_cast<unsigned>(q);
        const std::size_t states = std::size_t(1) << Q;
        auto w_at = [&](int s, long long k) -> const Rational* {
            if (k < 0 || k >= static_cast<long long>(law[s].size())) return nullptr;
            return &law[s][static_cast<std::size_t>(k)];
        };
        // vec[state] = weighted count of carry tuples entering the current level
        std::vector<Rational> vec(states, Rational(0));
        vec[0] = 1;
        for (int s = ell - 1; s >= 0; --s) {
            std::vector<Rational> next(states, Rational(0));
            for (std::size_t cin = 0; cin < states; ++cin) {
                if (vec[cin] == 0) continue;
                for (std::size_t cout = 0; cout < states; ++cout) {
                    Rational acc(0);
                    for (std::uint64_t d = 0; d < B; ++d) {
                        Rational prod(1);
                        bool ok = true;
                        for (unsigned r = 0; r < Q && ok; ++r) {
                            long long k = static_cast<long long>(d) + static_cast<long long>(B) * ((cout >> r) & 1) -
                                          static_cast<long long>((cin >> r) & 1);
                            const Rational* wk = w_at(s, k);
                            if (!wk)
                                ok = false;
                            else
                                prod *= *wk;
                        }
                        if (ok) acc += prod;
                    }
                    if (acc != 0) next[cout] += vec[cin] * acc;
                }
            }
            vec.swap(next);
        }
        Rational total = vec[0] + vec[states - 1]; // all copies must agree on the overflow digit
        rep.exact_norm_conv = total;
        rep.log2_norm_conv = static_cast<double>(log2_rational(total));
    } else {
        // enumerate the distinct values of Z with their masses
        std::map<std::uint64_t, double> mass{{0, 1.0}};
        for (int s = 0; s < ell; ++s) {
            const int shift = D * (ell - 1 - s);
            std::map<std::uint64_t, double> next;
            for (auto [z, x] : mass)
                for (std::size_t k = 0; k < law[s].size(); ++k) {
                    next[z + (std::uint64_t(k) << shift)] += x * law[s][k].get_d();
                    if (next.size() > enumeration_cap)
                        fail(ErrorKind::resource, "self-convolution support exceeds the enumeration cap");
                }
            mass.swap(next);
        }
        std::vector<double> masses;
        for (auto [z, x] : mass) masses.push_back(x);
        rep.log2_norm_conv = static_cast<double>(log2_power_sum(std::span<const double>(masses), q));
    }
    rep.gap = std::fabs(rep.log2_norm_conv - rep.log2_norm_mu) / (static_cast<double>(D) * ell);

    // branching of supp(μ∗μ) on D(l+1) bits (one extra leading digit for the overflow)
    double support_bound = 1;
    for (int s = 0; s < ell; ++s) support_bound *= static_cast<double>(law[s].size());
    if (support_bound <= static_cast<double>(std::size_t(1) << 22) && D * (ell + 1) <= 62) {
        std::set<std::uint64_t> supp{0};
        for (int s = 0; s < ell; ++s) {
            const int shift = D * (ell - 1 - s);
            std::set<std::uint64_t> next;
            for (std::uint64_t z : supp)
                for (std::size_t k = 0; k < law[s].size(); ++k) next.insert(z + (std::uint64_t(k) << shift));
            supp.swap(next);
        }
        rep.conv_branching = regularity_check(std::vector<std::uint64_t>(supp.begin(), supp.end()), D * (ell + 1), D);
    }
    return rep;
}

} // namespace lqdim
