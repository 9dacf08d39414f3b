#pragma once

/**
 * @file wifs.hpp
 * @brief Weighted iterated function systems of similarities x -> lambda_i x + t_i on the line.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lqdim/numeric.hpp"
#include "lqdim/scalar.hpp"

namespace lqdim {

struct Similarity {
    Scalar ratio;
    Scalar translation;

    Scalar operator()(const Scalar& x) const { return ratio * x + translation; }
    /// The unique fixed point t / (1 - ratio).
    Scalar fixed_point() const { return translation * inverse(Scalar(1) - ratio); }
};

/// this ∘ other
inline Similarity compose(const Similarity& f, const Similarity& g) {
    return {f.ratio * g.ratio, f.ratio * g.translation + f.translation};
}

struct Wifs {
    std::vector<Similarity> maps;
    std::vector<Rational> weights;

    std::size_t size() const { return maps.size(); }

    bool homogeneous() const {
        return std::all_of(maps.begin(), maps.end(), [&](const Similarity& f) { return f.ratio == maps.front().ratio; });
    }

    bool is_exact() const {
        return std::all_of(maps.begin(), maps.end(),
                           [](const Similarity& f) { return f.ratio.is_exact() && f.translation.is_exact(); });
    }

    /// Common ratio of a homogeneous system.
    const Scalar& ratio() const {
        if (maps.empty() || !homogeneous()) fail(ErrorKind::unsupported, "operation needs a homogeneous WIFS");
        return maps.front().ratio;
    }

    std::vector<double> weights_double() const {
        std::vector<double> out;
        for (const auto& p : weights) out.push_back(p.get_d());
        return out;
    }
};

struct ValidationResult {
    bool ok = true;
    std::string violation;
    explicit operator bool() const { return ok; }
};

inline ValidationResult validate(const Wifs& w) {
    auto bad = [](std::string why) { return ValidationResult{false, std::move(why)}; };
    if (w.maps.size() < 2) return bad("a WIFS needs at least 2 maps, got " + std::to_string(w.maps.size()));
    if (w.weights.size() != w.maps.size())
        return bad("got " + std::to_string(w.weights.size()) + " weights for " + std::to_string(w.maps.size()) + " maps");
    long field = 0;
    for (std::size_t i = 0; i < w.maps.size(); ++i) {
        const Similarity& f = w.maps[i];
        for (const Scalar* s : {&f.ratio, &f.translation}) {
            long d = s->field();
            if (d != 0 && field != 0 && d != field)
                return bad("map " + std::to_string(i) + " mixes quadratic fields sqrt(" + std::to_string(field) +
                           ") and sqrt(" + std::to_string(d) + ")");
            if (d != 0) field = d;
        }
        if (f.ratio.is_zero() || compare(abs(f.ratio), Scalar(1)) >= 0)
            return bad("map " + std::to_string(i) + " has |lambda| = |" + f.ratio.to_string() + "| outside (0,1)");
    }
    Rational total(0);
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
        if (sgn(w.weights[i]) <= 0)
            return bad("weight " + std::to_string(i) + " = " + w.weights[i].get_str() + " is not positive");
        total += w.weights[i];
    }
    if (total != 1) return bad("weights sum to " + total.get_str() + ", not 1");
    return {};
}

inline void require_valid(const Wifs& w) {
    if (auto v = validate(w); !v) fail(ErrorKind::validation, v.violation);
}

struct DimensionReport {
    double q = 0.0;
    double entropy = 0.0;  ///< Σ p log2(1/p)
    double lyapunov = 0.0; ///< Σ p log2(1/|lambda|)
    double sdim = 0.0;
    double T = 0.0;
    double sdim_q = 0.0;
    double residual = 0.0; ///< |Σ p^q |lambda|^{-T} - 1|
    bool sdim_clipped = false;
    bool sdim_q_clipped = false;
    double predicted_dim() const { return std::min(sdim, 1.0); }
    double predicted_Dq() const { return std::min(sdim_q, 1.0); }
};

namespace detail {

inline long double log2_abs(const Scalar& x) { return std::log2l(std::fabs(static_cast<long double>(x.approx()))); }

inline long double T_residual(const std::vector<long double>& log_p, const std::vector<long double>& log_l, double q,
                              long double T) {
    CompensatedSum s;
    for (std::size_t i = 0; i < log_p.size(); ++i) s.add(std::exp2l(q * log_p[i] - T * log_l[i]));
    return s.value() - 1.0L;
}

} // namespace detail

/**
 * Symbolic dimensions of w at q > 1. T solves Σ p_i^q |lambda_i|^{-T} = 1;
 * closed form for homogeneous systems, bisection on [0, 40] otherwise.
 */
inline DimensionReport similarity_dimensions(const Wifs& w, double q) {
    require_valid(w);
    if (!(q > 1)) fail(ErrorKind::domain, "sdim_q needs q > 1");
    std::vector<long double> log_p, log_l;
    DimensionReport r;
    r.q = q;
    long double H = 0, L = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        long double lp = log2_rational(w.weights[i]);
        long double ll = detail::log2_abs(w.maps[i].ratio);
        long double p = std::exp2l(lp);
        log_p.push_back(lp);
        log_l.push_back(ll);
        H -= p * lp;
        L -= p * ll;
    }
    r.entropy = static_cast<double>(H);
    r.lyapunov = static_cast<double>(L);
    r.sdim = static_cast<double>(H / L);

    long double T = 0;
    if (w.homogeneous()) {
        std::vector<long double> lq;
        for (auto lp : log_p) lq.push_back(q * lp);
        T = log2_power_sum_from_logs(lq) / log_l.front();
    } else {
        long double lo = 0, hi = 40;
        if (detail::T_residual(log_p, log_l, q, lo) > 0 || detail::T_residual(log_p, log_l, q, hi) < 0)
            fail(ErrorKind::convergence, "bisection bracket [0,40] does not straddle the root of T(q)");
        for (int it = 0; it < 200 && hi - lo > 0; ++it) {
            long double mid = (lo + hi) / 2;
            if (mid == lo || mid == hi) break;
            (detail::T_residual(log_p, log_l, q, mid) < 0 ? lo : hi) = mid;
        }
        T = (lo + hi) / 2;
    }
    r.residual = static_cast<double>(std::fabs(detail::T_residual(log_p, log_l, q, T)));
    if (!(r.residual <= 1e-12))
        fail(ErrorKind::convergence, "T(q) residual " + std::to_string(r.residual) + " exceeds 1e-12");
    r.T = static_cast<double>(T);
    r.sdim_q = static_cast<double>(T / (q - 1));
    r.sdim_clipped = r.sdim > 1;
    r.sdim_q_clipped = r.sdim_q > 1;
    return r;
}

/// x -> scale * x + shift
struct AffineMap {
    Scalar scale = Scalar(1);
    Scalar shift = Scalar(0);
    Scalar operator()(const Scalar& x) const { return scale * x + shift; }
    bool is_identity() const { return scale == Scalar(1) && shift == Scalar(0); }
};

/// Fixed points of all words of length 1 and 2; they include both hull endpoints.
inline std::pair<Scalar, Scalar> attractor_hull(const Wifs& w) {
    std::vector<Scalar> pts;
    for (const auto& f : w.maps) {
        pts.push_back(f.fixed_point());
        for (const auto& g : w.maps) pts.push_back(compose(f, g).fixed_point());
    }
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const Scalar& a, const Scalar& b) { return a < b; });
    return {*lo, *hi};
}

struct NormalizedWifs {
    Wifs wifs;
    AffineMap map; ///< change of variables taking the old attractor to the new one
    bool approximate = false;
};

/// Margin kept below 1 when a system has to be rescaled.
inline const Rational& normalization_margin() {
    static const Rational m(1, 256);
    return m;
}

/**
 * Conjugate w by an affine map so the attractor lies in [0,1]. Systems whose
 * hull already sits in [0,1] are returned unchanged; otherwise the minimum is
 * moved to 0 and the result is shrunk by the least power of two that leaves a
 * margin of 2^-8 below 1.
 */
inline NormalizedWifs normalize_to_unit(const Wifs& w) {
    require_valid(w);
    NormalizedWifs out{w, {}, !w.is_exact()};
    auto [lo, hi] = attractor_hull(w);
    if (lo.sign() >= 0 && compare(hi, Scalar(1)) <= 0) return out;
    Scalar diam = hi - lo;
    Scalar limit = Scalar(Rational(1 - normalization_margin()));
    int k = 0;
    Scalar s(1);
    while (compare(diam * s, limit) > 0) {
        ++k;
        s = scale_pow2(Scalar(1), -k);
    }
    AffineMap phi{s, -(s * lo)};
    out.map = phi;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& f = w.maps[i];
        out.wifs.maps[i] = {f.ratio, s * f.translation + phi.shift * (Scalar(1) - f.ratio)};
    }
    return out;
}

/// Replace a negative common ratio by its square via the |I|^2 compositions f_i∘f_j.
inline Wifs square_if_negative(const Wifs& w) {
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "square_if_negative needs a homogeneous WIFS");
    if (w.ratio().sign() > 0) return w;
    Wifs out;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) {
            out.maps.push_back(compose(w.maps[i], w.maps[j]));
            out.weights.push_back(w.weights[i] * w.weights[j]);
        }
    return out;
}

// ---- presets -------------------------------------------------------------

inline Wifs bernoulli(const Scalar& lambda) {
    if (lambda.sign() <= 0 || compare(lambda, Scalar(1)) >= 0)
        fail(ErrorKind::domain, "bernoulli preset needs lambda in (0,1), got " + lambda.to_string());
    Rational half(1, 2);
    return Wifs{{{lambda, Scalar(0)}, {lambda, Scalar(1)}}, {half, half}};
}

inline std::vector<int> check_digits(int p, std::vector<int> digits) {
    if (p < 2) fail(ErrorKind::domain, "p-Cantor base must be >= 2");
    std::sort(digits.begin(), digits.end());
    digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
    if (digits.empty()) fail(ErrorKind::domain, "empty digit set");
    for (int d : digits)
        if (d < 0 || d >= p) fail(ErrorKind::domain, "digit " + std::to_string(d) + " outside {0,...,p-1}");
    if (static_cast<int>(digits.size()) == p) fail(ErrorKind::domain, "digit set must be a proper subset of {0,...,p-1}");
    return digits;
}

/// Maps (x + j)/p for j in D, uniform weights.
inline Wifs p_cantor(int p, std::vector<int> digits) {
    digits = check_digits(p, std::move(digits));
    Wifs w;
    Scalar lambda(make_rational(1, p));
    for (int j : digits) {
        w.maps.push_back({lambda, Scalar(make_rational(j, p))});
        w.weights.push_back(make_rational(1, static_cast<long>(digits.size())));
    }
    if (w.maps.size() < 2) fail(ErrorKind::domain, "p-Cantor preset needs at least 2 digits");
    return w;
}

/// Maps (x + i + t j)/p for (i, j) in D x D, i-major order, uniform weights.
inline Wifs projected_product(int p, std::vector<int> digits, const Scalar& t) {
    digits = check_digits(p, std::move(digits));
    Wifs w;
    Scalar inv_p(make_rational(1, p));
    long n = static_cast<long>(digits.size() * digits.size());
    for (int i : digits)
        for (int j : digits) {
            w.maps.push_back({inv_p, (Scalar(i) + t * Scalar(j)) * inv_p});
            w.weights.push_back(make_rational(1, n));
        }
    return w;
}

inline std::vector<int> parse_digits(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(ErrorKind::config, "cannot parse digit list '" + text + "'");
        }
    }
    return out;
}

/**
 * Build a preset from its shorthand:
 *   cantor | golden | bernoulli:<lambda> | p_cantor:<p>:<d,d,..> | projected_product:<p>:<d,..>:<t>
 */
inline Wifs preset(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) fail(ErrorKind::config, "empty preset name");
    const std::string& name = parts[0];
    auto need = [&](std::size_t n) {
        if (parts.size() != n) fail(ErrorKind::config, "preset '" + spec + "' has the wrong number of parameters");
    };
    auto to_int = [&](const std::string& s) {
        try {
            return std::stoi(s);
        } catch (const std::exception&) {
            fail(ErrorKind::config, "bad integer '" + s + "' in preset '" + spec + "'");
        }
    };
    if (name == "cantor") {
        need(1);
        return p_cantor(3, {0, 2});
    }
    if (name == "golden") {
        need(1);
        return bernoulli(Scalar::golden());
    }
    if (name == "bernoulli") {
        need(2);
        return bernoulli(parse_scalar(parts[1]));
    }
    if (name == "p_cantor") {
        need(3);
        return p_cantor(to_int(parts[1]), parse_digits(parts[2]));
    }
    if (name == "projected_product") {
        need(4);
        return projected_product(to_int(parts[1]), parse_digits(parts[2]), parse_scalar(parts[3]));
    }
    fail(ErrorKind::config, "unknown preset '" + name + "'");
}

} // namespace lqdim
