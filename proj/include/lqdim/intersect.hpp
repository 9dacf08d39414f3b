#pragma once

/**
 * @file intersect.hpp
 * @brief Products, projections Π_t(x, y) = x + t y, and fiber counts for
 *        intersections A ∩ (tA + u) of p-Cantor sets.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lqdim/measure.hpp"
#include "lqdim/separation.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

/// Push-forward of μ × ν under (x, y) -> x + t y.
inline DiscreteMeasure product_project(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Scalar& t,
                                       std::size_t atom_cap = default_atom_cap) {
    if (mu.size() != 0 && nu.size() > atom_cap / mu.size())
        fail(ErrorKind::resource, "product measure exceeds the atom cap");
    std::vector<Atom> out;
    out.reserve(mu.size() * nu.size());
    for (const auto& x : mu.atoms())
        for (const auto& y : nu.atoms()) out.push_back({x.position + t * y.position, x.mass * y.mass});
    return DiscreteMeasure::from_atoms(std::move(out));
}

/// Level-n digit set {Σ_{j<=n} d_j p^{-j} : d_j in D}, sorted.
inline std::vector<double> cantor_points(int p, const std::vector<int>& digits, int n) {
    if (n < 0 || n > 40) fail(ErrorKind::domain, "level n must lie in [0, 40]");
    if (std::pow(static_cast<double>(digits.size()), n) > 1e8) fail(ErrorKind::resource, "too many level-n points");
    std::vector<double> pts{0.0};
    double scale_j = 1.0;
    for (int j = 1; j <= n; ++j) {
        scale_j /= p;
        std::vector<double> next;
        next.reserve(pts.size() * digits.size());
        for (double x : pts)
            for (int d : digits) next.push_back(x + d * scale_j);
        pts.swap(next);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

struct IntersectionBound {
    double s = 0;     ///< log|D| / log p
    double bound = 0; ///< max(2s - 1, 0)
};

inline IntersectionBound intersection_bound(int p, const std::vector<int>& digits) {
    auto d = check_digits(p, digits);
    IntersectionBound b;
    b.s = std::log(static_cast<double>(d.size())) / std::log(static_cast<double>(p));
    b.bound = std::max(2 * b.s - 1, 0.0);
    return b;
}

/// Size of a greedy ε-separated subset of sorted points (consecutive kept points at distance >= ε).
inline std::size_t greedy_separated_count(const std::vector<double>& sorted, double eps) {
    std::size_t n = 0;
    double last = -std::numeric_limits<double>::infinity();
    for (double x : sorted)
        if (x - last >= eps * (1 - 1e-9)) {
            ++n;
            last = x;
        }
    return n;
}

/**
 * Frostman exponent estimate of a discrete measure given as sorted positions
 * with masses: min over radii r of log(max_x ν[x - r, x + r]) / log r.
 */
inline double frostman_estimate(const std::vector<std::pair<double, double>>& atoms, const std::vector<double>& radii) {
    double alpha = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        double best = 0, window = 0;
        std::size_t lo = 0, hi = 0;
        for (std::size_t c = 0; c < atoms.size(); ++c) {
            while (hi < atoms.size() && atoms[hi].first <= atoms[c].first + r) window += atoms[hi++].second;
            while (atoms[lo].first < atoms[c].first - r) window -= atoms[lo++].second;
            best = std::max(best, window);
        }
        alpha = std::min(alpha, std::log(std::min(best, 1.0)) / std::log(r));
    }
    return alpha;
}

struct FiberReport {
    int p = 0;
    std::vector<int> digits;
    std::string t;
    std::string u;
    int n = 0;
    double eps = 0;
    std::size_t N = 0;        ///< ε-separated fiber count
    double s = 0;             ///< log|D| / log p
    double s_hat = 0;         ///< every product atom has mass eps^{2 s_hat}
    double alpha_hat = 0;     ///< Frostman estimate of the projection x - t y of μ_n × μ_n
    double C = 0;             ///< N eps^{2 s_hat - alpha_hat}
    double C_limit = 8;
    bool lemma_bound_holds = false;
    double theory_bound = 0;  ///< max(2s - 1, 0)
    std::string regime;       ///< "rational-t regime" | "assumed irrational" | "irrational"
    bool irrational_claim = false;
    std::optional<int> projected_overlap_level;
    std::vector<std::string> notes;
};

/**
 * Count points of A_n within ε of tA_n + u, thinned to an ε-separated set,
 * and compare against N <= C ε^{-(2s - α)} with α the Frostman estimate of
 * the projection (x, y) -> x - t y, whose fiber over u is A ∩ (tA + u).
 */
inline FiberReport fiber_count(int p, std::vector<int> digits, int n, const Scalar& t, const Scalar& u,
                               std::optional<double> eps_opt = std::nullopt) {
    digits = check_digits(p, std::move(digits));
    if (n < 1) fail(ErrorKind::domain, "level n must be >= 1");
    FiberReport r;
    r.p = p;
    r.digits = digits;
    r.t = t.to_string();
    r.u = u.to_string();
    r.n = n;
    const double level_eps = std::pow(static_cast<double>(p), -n);
    r.eps = eps_opt.value_or(level_eps);
    if (r.eps < level_eps * (1 - 1e-12)) fail(ErrorKind::domain, "eps must be at least p^-n");

    const double td = t.approx(), ud = u.approx();
    std::vector<double> A = cantor_points(p, digits, n);
    std::vector<double> B;
    B.reserve(A.size());
    for (double y : A) B.push_back(td * y + ud);
    std::sort(B.begin(), B.end());
    std::vector<double> fiber;
    for (double x : A) {
        auto it = std::lower_bound(B.begin(), B.end(), x - r.eps * (1 + 1e-9));
        if (it != B.end() && *it <= x + r.eps * (1 + 1e-9)) fiber.push_back(x);
    }
    r.N = greedy_separated_count(fiber, r.eps);

    IntersectionBound ib = intersection_bound(p, digits);
    r.s = ib.s;
    r.theory_bound = ib.bound;
    r.s_hat = ib.s;

    std::vector<std::pair<double, double>> proj;
    const double w = 1.0 / (static_cast<double>(A.size()) * static_cast<double>(A.size()));
    proj.reserve(A.size() * A.size());
    for (double x : A)
        for (double y : A) proj.emplace_back(x - td * y, w);
    std::sort(proj.begin(), proj.end());
    std::vector<double> radii;
    for (int k = (n + 1) / 2; k <= n; ++k) radii.push_back(std::pow(static_cast<double>(p), -k));
    r.alpha_hat = frostman_estimate(proj, radii);
    r.C = static_cast<double>(r.N) * std::pow(r.eps, 2 * r.s_hat - r.alpha_hat);
    r.lemma_bound_holds = r.C <= r.C_limit;

    switch (t.kind()) {
    case Scalar::Kind::rational: {
        r.regime = "rational-t regime";
        r.irrational_claim = false;
        auto overlap = detect_exact_overlap(projected_product(p, digits, t), 3);
        if (overlap) r.projected_overlap_level = overlap->k;
        r.notes.push_back("the intersection bound is stated for irrational t only; no claim is made here");
        break;
    }
    case Scalar::Kind::quadratic:
        r.regime = "irrational";
        r.irrational_claim = true;
        break;
    case Scalar::Kind::floating:
        r.regime = "assumed irrational";
        r.irrational_claim = true;
        r.notes.push_back("t is a float; irrationality is assumed, not certified");
        break;
    }
    return r;
}

} // namespace lqdim
