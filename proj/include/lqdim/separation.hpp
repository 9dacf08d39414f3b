#pragma once

/**
 * @file separation.hpp
 * @brief Separation numbers Gamma_k, exact overlap detection and rational lower-bound certificates.
 *
 * Words are letter sequences (i_1, ..., i_k); the word's map is f_{i_1} ∘ ... ∘ f_{i_k}.
 * Two maps with different ratios are at distance 1, equal ratios at the
 * distance of their translations.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lqdim/scalar.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

inline constexpr std::size_t default_word_cap = 10'000'000;

using Word = std::vector<int>;

struct GammaRecord {
    int k = 0;
    Scalar value;          ///< Gamma_k (exact unless the system has float scalars)
    bool overlap = false;  ///< two distinct words give the same map
    std::optional<std::pair<Word, Word>> witness;
    bool no_equal_ratio_pair = false; ///< every pair of words has distinct ratios
};

namespace detail {

inline std::string ratio_key(const Scalar& x) {
    if (x.is_exact()) return canonical_key(x);
    double v = x.as_double_variant();
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return "f" + std::to_string(bits);
}

inline Word decode_word(std::size_t index, std::size_t letters, int k) {
    Word w(static_cast<std::size_t>(k));
    for (int pos = k - 1; pos >= 0; --pos) {
        w[static_cast<std::size_t>(pos)] = static_cast<int>(index % letters);
        index /= letters;
    }
    return w;
}

inline std::size_t word_count(std::size_t letters, int k, std::size_t cap) {
    std::size_t n = 1;
    for (int i = 0; i < k; ++i) {
        if (n > cap / letters) return cap + 1;
        n *= letters;
    }
    return n;
}

} // namespace detail

/// All level-k maps, indexed with i_1 as the most significant base-|I| digit.
inline std::vector<Similarity> level_maps(const Wifs& w, int k, std::size_t cap = default_word_cap) {
    if (k < 1) fail(ErrorKind::domain, "word length must be >= 1");
    if (detail::word_count(w.size(), k, cap) > cap)
        fail(ErrorKind::resource, std::to_string(w.size()) + "^" + std::to_string(k) +
                                      " words exceed the enumeration cap; use certificate mode");
    std::vector<Similarity> cur = w.maps;
    for (int level = 2; level <= k; ++level) {
        std::vector<Similarity> next;
        next.reserve(cur.size() * w.size());
        for (const auto& f : w.maps)
            for (const auto& g : cur) next.push_back(compose(f, g));
        cur.swap(next);
    }
    return cur;
}

/// Gamma_k with the lexicographically smallest witness pair attaining it.
inline GammaRecord separation_number(const Wifs& w, int k, std::size_t cap = default_word_cap) {
    require_valid(w);
    std::vector<Similarity> maps = level_maps(w, k, cap);
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < maps.size(); ++i) groups[detail::ratio_key(maps[i].ratio)].push_back(i);

    GammaRecord rec;
    rec.k = k;
    std::optional<Scalar> best;
    std::pair<std::size_t, std::size_t> best_pair{0, 0};
    for (auto& [key, idx] : groups) {
        if (idx.size() < 2) continue;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return compare(maps[a].translation, maps[b].translation) < 0;
        });
        for (std::size_t r = 0; r + 1 < idx.size(); ++r) {
            Scalar gap = maps[idx[r + 1]].translation - maps[idx[r]].translation;
            std::pair<std::size_t, std::size_t> pair = std::minmax(idx[r], idx[r + 1]);
            int c = best ? compare(gap, *best) : -1;
            if (c < 0 || (c == 0 && pair < best_pair)) {
                best = gap;
                best_pair = pair;
            }
        }
    }
    bool mixed_ratios = groups.size() > 1;
    if (!best) {
        rec.no_equal_ratio_pair = true;
        rec.value = Scalar(1);
        return rec;
    }
    if (mixed_ratios && compare(*best, Scalar(1)) > 0) {
        rec.value = Scalar(1);
        return rec;
    }
    rec.value = *best;
    rec.overlap = best->is_zero();
    rec.witness = std::make_pair(detail::decode_word(best_pair.first, w.size(), k),
                                 detail::decode_word(best_pair.second, w.size(), k));
    return rec;
}

/// Earliest k <= k_max with an exact overlap, or nullopt.
inline std::optional<GammaRecord> detect_exact_overlap(const Wifs& w, int k_max, std::size_t cap = default_word_cap) {
    if (!w.is_exact()) fail(ErrorKind::refused, "exact overlap detection needs exact scalars; float zero is undecidable");
    for (int k = 1; k <= k_max; ++k) {
        GammaRecord r = separation_number(w, k, cap);
        if (r.overlap) return r;
    }
    return std::nullopt;
}

struct SeparationCertificate {
    bool issued = false;
    std::string refusal;
    int k = 0;
    BigInt den_lambda;
    BigInt den_t;
    Rational bound;             ///< Gamma_k >= 1 / (den_lambda^(k-1) den_t)
    Rational delta;             ///< 1 / (den_lambda den_t)
    bool overlap_checked = false; ///< level-k enumeration confirmed no exact overlap
    std::optional<BigInt> witness_numerator; ///< Gamma_k den_lambda^(k-1) den_t, an integer
};

/**
 * For rational homogeneous systems every level-k translation difference is an
 * integer divided by den(lambda)^(k-1) den(t); a nonzero difference is at
 * least that reciprocal.
 */
inline SeparationCertificate certified_gamma_lower_bound(const Wifs& w, int k, std::size_t cap = default_word_cap) {
    require_valid(w);
    SeparationCertificate c;
    c.k = k;
    if (k < 1) fail(ErrorKind::domain, "certificate level must be >= 1");
    if (!w.homogeneous()) {
        c.refusal = "certificates are only implemented for homogeneous systems";
        return c;
    }
    for (const auto& f : w.maps)
        if (!f.ratio.is_rational() || !f.translation.is_rational()) {
            c.refusal = "certificates need rational parameters; quadratic (degree 2) and float inputs are not certified";
            return c;
        }
    const Rational& lambda = w.ratio().as_rational();
    c.den_lambda = lambda.get_den();
    c.den_t = 1;
    for (const auto& f : w.maps) mpz_lcm(c.den_t.get_mpz_t(), c.den_t.get_mpz_t(), f.translation.as_rational().get_den_mpz_t());
    BigInt scale_k;
    mpz_pow_ui(scale_k.get_mpz_t(), c.den_lambda.get_mpz_t(), static_cast<unsigned long>(k - 1));
    scale_k *= c.den_t;
    c.bound = Rational(BigInt(1), scale_k);
    c.delta = Rational(BigInt(1), BigInt(c.den_lambda * c.den_t));
    if (detail::word_count(w.size(), k, cap) <= cap) {
        GammaRecord r = separation_number(w, k, cap);
        if (r.overlap) {
            c.refusal = "exact overlap at level " + std::to_string(k) + "; no positive lower bound exists";
            return c;
        }
        c.overlap_checked = true;
        Rational scaled = r.value.as_rational() * Rational(scale_k);
        if (scaled.get_den() != 1) fail(ErrorKind::refused, "internal: scaled Gamma_k is not an integer");
        c.witness_numerator = scaled.get_num();
    }
    c.issued = true;
    return c;
}

struct SeparationReport {
    std::vector<GammaRecord> gamma;
    double delta_hat = 0.0; ///< min_k Gamma_k^(1/k) over the computed range
    std::optional<int> first_overlap;
    std::optional<SeparationCertificate> certificate;
    std::vector<std::string> notes;
};

inline SeparationReport separation_report(const Wifs& w, int k_max, std::size_t cap = default_word_cap) {
    require_valid(w);
    if (k_max < 1) fail(ErrorKind::domain, "k_max must be >= 1");
    SeparationReport rep;
    rep.delta_hat = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k) {
        if (detail::word_count(w.size(), k, cap) > cap) {
            rep.notes.push_back("enumeration stopped at k = " + std::to_string(k - 1) + " (word cap)");
            break;
        }
        GammaRecord r;
        if (rep.first_overlap) {
            // once two words coincide, extending both by the same letters keeps them equal
            r = rep.gamma.back();
            r.k = k;
            r.witness->first.push_back(0);
            r.witness->second.push_back(0);
        } else {
            r = separation_number(w, k, cap);
        }
        if (r.overlap && !rep.first_overlap) rep.first_overlap = k;
        double v = r.value.approx();
        rep.delta_hat = std::min(rep.delta_hat, v <= 0 ? 0.0 : std::pow(v, 1.0 / k));
        rep.gamma.push_back(std::move(r));
    }
    if (rep.gamma.empty()) fail(ErrorKind::resource, "no separation level fits under the word cap");
    SeparationCertificate cert = certified_gamma_lower_bound(w, rep.gamma.back().k, cap);
    rep.certificate = cert;
    rep.notes.push_back("exponential separation is a statement about infinitely many k; delta_hat is finite evidence "
                        "over k <= " + std::to_string(rep.gamma.back().k));
    rep.notes.push_back("exact arithmetic covers rational and real quadratic (degree <= 2) parameters only");
    if (!w.homogeneous()) rep.notes.push_back("non-homogeneous system: only equal-ratio word pairs are compared");
    return rep;
}

} // namespace lqdim
