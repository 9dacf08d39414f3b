#pragma once

/**
 * @file measure.hpp
 * @brief Finite atomic probability measures with exact collapsing of equal positions.
 *
 * Masses are always exact rationals (weights of a WIFS are rational, so every
 * measure built from one keeps exact masses). Positions are scalars; two atoms
 * are merged when their canonical keys agree, or, for float positions, when
 * their bit patterns agree, in which case the measure is flagged approximate.
 */

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lqdim/numeric.hpp"
#include "lqdim/scalar.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

struct Atom {
    Scalar position;
    Rational mass;
};

inline constexpr std::size_t default_atom_cap = 100'000'000;

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    /// Collapse equal positions, drop nothing, sort by position.
    static DiscreteMeasure from_atoms(std::vector<Atom> atoms) {
        DiscreteMeasure m;
        std::unordered_map<std::string, std::size_t> index;
        index.reserve(atoms.size() * 2);
        for (auto& a : atoms) {
            if (sgn(a.mass) <= 0) fail(ErrorKind::domain, "atom masses must be positive");
            if (!a.position.is_exact()) m.approximate_ = true;
            auto [it, fresh] = index.try_emplace(position_key(a.position), m.atoms_.size());
            if (fresh)
                m.atoms_.push_back(std::move(a));
            else
                m.atoms_[it->second].mass += a.mass;
        }
        std::sort(m.atoms_.begin(), m.atoms_.end(),
                  [](const Atom& x, const Atom& y) { return compare(x.position, y.position) < 0; });
        return m;
    }

    static DiscreteMeasure dirac(const Scalar& x) { return from_atoms({{x, Rational(1)}}); }

    /// Δ = Σ p_i δ_{t_i}
    static DiscreteMeasure delta_of(const Wifs& w) {
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < w.size(); ++i) atoms.push_back({w.maps[i].translation, w.weights[i]});
        return from_atoms(std::move(atoms));
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool approximate() const { return approximate_; }

    Rational total_mass() const {
        Rational t(0);
        for (const auto& a : atoms_) t += a.mass;
        return t;
    }

    std::vector<Rational> masses() const {
        std::vector<Rational> out;
        out.reserve(atoms_.size());
        for (const auto& a : atoms_) out.push_back(a.mass);
        return out;
    }

    std::vector<double> masses_double() const {
        std::vector<double> out;
        out.reserve(atoms_.size());
        for (const auto& a : atoms_) out.push_back(a.mass.get_d());
        return out;
    }

private:
    static std::string position_key(const Scalar& x) {
        if (x.is_exact()) return canonical_key(x);
        double v = x.as_double_variant();
        if (v == 0) v = 0.0; // fold -0 onto +0
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        return "f" + std::to_string(bits);
    }

    std::vector<Atom> atoms_;
    bool approximate_ = false;
};

inline DiscreteMeasure convolve(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                std::size_t atom_cap = default_atom_cap) {
    if (a.size() != 0 && b.size() > atom_cap / a.size())
        fail(ErrorKind::resource, "convolution would produce " + std::to_string(a.size()) + " x " +
                                      std::to_string(b.size()) +
                                      " candidate atoms, above the cap; use the histogram method instead");
    std::vector<Atom> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.atoms())
        for (const auto& y : b.atoms()) out.push_back({x.position + y.position, x.mass * y.mass});
    return DiscreteMeasure::from_atoms(std::move(out));
}

/// Push-forward under x -> c x.
inline DiscreteMeasure scale(const DiscreteMeasure& a, const Scalar& c) {
    if (c.is_zero()) fail(ErrorKind::domain, "degenerate scale by 0");
    std::vector<Atom> out;
    for (const auto& x : a.atoms()) out.push_back({c * x.position, x.mass});
    return DiscreteMeasure::from_atoms(std::move(out));
}

/// Push-forward under x -> x + c.
inline DiscreteMeasure translate(const DiscreteMeasure& a, const Scalar& c) {
    std::vector<Atom> out;
    for (const auto& x : a.atoms()) out.push_back({x.position + c, x.mass});
    return DiscreteMeasure::from_atoms(std::move(out));
}

/// μ_n = Δ ∗ S_λΔ ∗ ... ∗ S_{λ^{n-1}}Δ, collapsing after every factor.
inline DiscreteMeasure level_n_measure(const Wifs& w, int n, std::size_t atom_cap = default_atom_cap) {
    require_valid(w);
    if (n < 1) fail(ErrorKind::domain, "level_n_measure needs n >= 1");
    const Scalar& lambda = w.ratio();
    DiscreteMeasure delta = DiscreteMeasure::delta_of(w);
    DiscreteMeasure mu = delta;
    Scalar power = lambda;
    for (int j = 1; j < n; ++j) {
        mu = convolve(mu, scale(delta, power), atom_cap);
        power *= lambda;
    }
    return mu;
}

/// Exact Σ mass^q for integer q.
inline Rational exact_q_sum(const DiscreteMeasure& a, unsigned q) {
    auto m = a.masses();
    return exact_power_sum(m, q);
}

/// log2 Σ mass^q; exact before the log whenever q is a small integer.
inline long double log2_q_sum(const std::vector<Rational>& masses, double q) {
    if (!(q > 1)) fail(ErrorKind::domain, "q-norms need q > 1");
    if (is_small_integer(q)) return log2_rational(exact_power_sum(masses, static_cast<unsigned>(q)));
    return log2_power_sum(std::span<const Rational>(masses), q);
}

inline long double log2_q_sum(const DiscreteMeasure& a, double q) { return log2_q_sum(a.masses(), q); }

/// ‖a‖_q; q = infinity gives the largest mass.
inline double q_norm(const DiscreteMeasure& a, double q) {
    if (std::isinf(q) && q > 0) {
        Rational best(0);
        for (const auto& x : a.atoms()) best = std::max(best, x.mass);
        return best.get_d();
    }
    return static_cast<double>(std::exp2l(log2_q_sum(a, q) / q));
}

inline long double entropy_of(const std::vector<Rational>& masses) {
    CompensatedSum s;
    for (const auto& m : masses) s.add(-static_cast<long double>(m.get_d()) * log2_rational(m));
    return s.value();
}

/// Shannon entropy in bits.
inline double entropy(const DiscreteMeasure& a) { return static_cast<double>(entropy_of(a.masses())); }

/// Normalised restriction to [x0, x1).
inline DiscreteMeasure restrict_normalize(const DiscreteMeasure& a, const Scalar& x0, const Scalar& x1) {
    std::vector<Atom> kept;
    Rational total(0);
    for (const auto& x : a.atoms())
        if (compare(x.position, x0) >= 0 && compare(x.position, x1) < 0) {
            kept.push_back(x);
            total += x.mass;
        }
    if (total == 0)
        fail(ErrorKind::empty_restriction, "interval [" + x0.to_string() + ", " + x1.to_string() + ") has zero mass");
    for (auto& x : kept) x.mass /= total;
    return DiscreteMeasure::from_atoms(std::move(kept));
}

} // namespace lqdim
