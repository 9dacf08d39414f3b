#pragma once

/**
 * @file histogram.hpp
 * @brief Level-m dyadic histograms: exact binning of atomic measures and the
 *        invariant-histogram fixed point iteration.
 *
 * Bin j is the half-open interval [j 2^-m, (j+1) 2^-m).
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "lqdim/measure.hpp"
#include "lqdim/numeric.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

struct DyadicHistogram {
    int level = 0;
    std::vector<std::int64_t> bins; ///< strictly increasing
    std::vector<double> mass;       ///< positive, parallel to bins
    std::optional<std::vector<Rational>> exact_mass;
    std::size_t boundary_ambiguous = 0;
    bool approximate = false;

    std::size_t size() const { return bins.size(); }

    long double total() const {
        CompensatedSum s;
        for (double x : mass) s.add(x);
        return s.value();
    }
};

/// Histogram from parallel (bin, mass) arrays; merges duplicates, drops zeros.
inline DyadicHistogram make_histogram(int level, std::vector<std::pair<std::int64_t, double>> entries) {
    std::sort(entries.begin(), entries.end());
    DyadicHistogram h;
    h.level = level;
    for (const auto& [j, x] : entries) {
        if (x <= 0) continue;
        if (!h.bins.empty() && h.bins.back() == j)
            h.mass.back() += x;
        else {
            h.bins.push_back(j);
            h.mass.push_back(x);
        }
    }
    h.approximate = true;
    return h;
}

/// Uniform measure on bins first..first+count-1, exact masses.
inline DyadicHistogram uniform_histogram(int level, std::int64_t count, std::int64_t first = 0) {
    DyadicHistogram h;
    h.level = level;
    Rational w(1, 1);
    w /= Rational(BigInt(count));
    h.exact_mass.emplace();
    for (std::int64_t j = 0; j < count; ++j) {
        h.bins.push_back(first + j);
        h.mass.push_back(w.get_d());
        h.exact_mass->push_back(w);
    }
    return h;
}

/// Bin atoms of a at level m, with exact floors for exact positions.
inline DyadicHistogram dyadic_bin(const DiscreteMeasure& a, int m) {
    if (m < 0 || m > 60) fail(ErrorKind::domain, "dyadic level must lie in [0, 60]");
    DyadicHistogram h;
    h.level = m;
    h.approximate = a.approximate();
    h.exact_mass.emplace();
    // Atoms are sorted by position, so bins arrive in non-decreasing order.
    for (const auto& atom : a.atoms()) {
        std::int64_t j = 0;
        if (atom.position.is_exact()) {
            BigInt f = floor(scale_pow2(atom.position, m));
            if (!f.fits_slong_p()) fail(ErrorKind::domain, "atom " + atom.position.to_string() + " outside binning range");
            j = f.get_si();
        } else {
            double v = std::ldexp(atom.position.as_double_variant(), m);
            double r = std::round(v);
            if (std::fabs(v - r) <= 1e-12 * std::max(1.0, std::fabs(v))) ++h.boundary_ambiguous;
            j = static_cast<std::int64_t>(std::floor(v));
        }
        if (!h.bins.empty() && h.bins.back() == j) {
            h.exact_mass->back() += atom.mass;
        } else {
            h.bins.push_back(j);
            h.exact_mass->push_back(atom.mass);
        }
    }
    for (const auto& x : *h.exact_mass) h.mass.push_back(x.get_d());
    return h;
}

/// Coarsen to level m' <= level by merging 2^(level - m') children.
inline DyadicHistogram downsample(const DyadicHistogram& h, int m) {
    if (m > h.level || m < 0) fail(ErrorKind::domain, "can only downsample to a coarser level");
    int shift = h.level - m;
    DyadicHistogram out;
    out.level = m;
    out.approximate = h.approximate;
    out.boundary_ambiguous = h.boundary_ambiguous;
    if (h.exact_mass) out.exact_mass.emplace();
    std::vector<CompensatedSum> sums;
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::int64_t j = h.bins[i] >> shift; // arithmetic shift = floor division
        if (out.bins.empty() || out.bins.back() != j) {
            out.bins.push_back(j);
            sums.emplace_back();
            if (h.exact_mass) out.exact_mass->push_back(Rational(0));
        }
        sums.back().add(h.mass[i]);
        if (h.exact_mass) out.exact_mass->back() += (*h.exact_mass)[i];
    }
    for (std::size_t i = 0; i < sums.size(); ++i)
        out.mass.push_back(out.exact_mass ? (*out.exact_mass)[i].get_d() : static_cast<double>(sums[i].value()));
    return out;
}

inline void write_histogram_csv(std::ostream& os, const DyadicHistogram& h) {
    os << "j,bin_left,mass\n";
    char buf[96];
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(h.bins[i]),
                      std::ldexp(static_cast<double>(h.bins[i]), -h.level), h.mass[i]);
        os << buf;
    }
}

struct InvariantHistogramOptions {
    int guard_bits = 4;
    double tolerance = 1e-10;
    int max_iterations = 0;                       ///< 0: ceil((m + 16) / log2(1/lambda))
    std::size_t memory_cap_bytes = std::size_t(1) << 31;
};

struct InvariantHistogramResult {
    DyadicHistogram histogram;
    int iterations = 0;
    double residual = 0.0; ///< total variation between the last two iterates
    bool converged = false; ///< residual reached the tolerance before the iteration cap
};

/**
 * Fixed point of ν -> Σ p_i f_i ν on the grid of level m + guard, starting
 * from the uniform density on the attractor's hull and treating ν as uniform
 * inside each fine bin.
 * Needs a homogeneous system with positive ratio whose attractor lies in [0,1].
 */
inline InvariantHistogramResult invariant_histogram(const Wifs& w, int m, InvariantHistogramOptions opts = {}) {
    require_valid(w);
    if (m < 0 || m > 26) fail(ErrorKind::domain, "invariant_histogram supports 0 <= m <= 26");
    const Scalar& lambda_s = w.ratio();
    if (lambda_s.sign() <= 0) fail(ErrorKind::unsupported, "invariant_histogram needs a positive ratio; square first");
    auto [lo, hi] = attractor_hull(w);
    if (lo.sign() < 0 || compare(hi, Scalar(1)) > 0)
        fail(ErrorKind::unsupported, "invariant_histogram needs the attractor inside [0,1]; normalize first");

    const int L = m + opts.guard_bits;
    const std::size_t N = std::size_t(1) << L;
    if (2 * N * sizeof(double) > opts.memory_cap_bytes)
        fail(ErrorKind::resource, "working grid 2^" + std::to_string(L) + " exceeds the memory cap; lower m or guard bits");

    const double lambda = lambda_s.approx();
    std::vector<double> p = w.weights_double();
    std::vector<double> shift; // translation in fine-bin units
    for (const auto& f : w.maps) shift.push_back(std::ldexp(f.translation.approx(), L));

    const int cap = opts.max_iterations > 0
                        ? opts.max_iterations
                        : static_cast<int>(std::ceil((m + 16) / std::log2(1.0 / lambda)));

    // Each fine bin is treated as carrying uniform density; its image under f_i
    // is an interval of length lambda < 1 bins, so it touches at most two bins.
    // start uniform on the fine bins covering the hull; the maps send the hull into itself
    const auto first_bin = static_cast<std::size_t>(std::floor(std::ldexp(lo.approx(), L)));
    const auto end_bin = std::min(N, std::max(first_bin + 1, static_cast<std::size_t>(std::ceil(std::ldexp(hi.approx(), L)))));
    std::vector<double> nu(N, 0.0), next(N);
    for (std::size_t k = first_bin; k < end_bin; ++k) nu[k] = 1.0 / static_cast<double>(end_bin - first_bin);
    const auto last = static_cast<std::int64_t>(N) - 1;
    InvariantHistogramResult result;
    for (int it = 1; it <= cap; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                if (nu[k] == 0) continue;
                const double a = lambda * static_cast<double>(k) + shift[i];
                const double b = a + lambda;
                const double mass = p[i] * nu[k];
                auto ja = std::clamp(static_cast<std::int64_t>(std::floor(a)), std::int64_t(0), last);
                auto jb = std::clamp(static_cast<std::int64_t>(std::floor(b)), std::int64_t(0), last);
                if (ja == jb || b == static_cast<double>(jb)) {
                    next[static_cast<std::size_t>(ja)] += mass;
                } else {
                    const double left = (static_cast<double>(jb) - a) / lambda;
                    next[static_cast<std::size_t>(ja)] += mass * left;
                    next[static_cast<std::size_t>(jb)] += mass * (1 - left);
                }
            }
        }
        CompensatedSum total;
        for (double x : next) total.add(x);
        const double t = static_cast<double>(total.value());
        if (!std::isfinite(t) || std::fabs(t - 1.0) > 1e-6)
            fail(ErrorKind::convergence, "invariant_histogram lost mass (total " + std::to_string(t) + ") after " +
                                             std::to_string(it) + " iterations");
        CompensatedSum tv;
        for (std::size_t j = 0; j < N; ++j) {
            next[j] /= t;
            tv.add(std::fabs(next[j] - nu[j]));
        }
        nu.swap(next);
        result.iterations = it;
        result.residual = static_cast<double>(tv.value());
        if (result.residual <= opts.tolerance) {
            result.converged = true;
            break;
        }
    }

    std::vector<std::pair<std::int64_t, double>> coarse;
    const int g = opts.guard_bits;
    for (std::size_t j = 0; j < N;) {
        CompensatedSum s;
        std::size_t end = j + (std::size_t(1) << g);
        for (; j < end; ++j) s.add(nu[j]);
        if (s.value() > 0) coarse.emplace_back(static_cast<std::int64_t>((j - 1) >> g), static_cast<double>(s.value()));
    }
    result.histogram = make_histogram(m, std::move(coarse));
    long double t = result.histogram.total();
    for (double& x : result.histogram.mass) x = static_cast<double>(x / t);
    return result;
}

} // namespace lqdim
