#pragma once

/**
 * @file spectrum.hpp
 * @brief L^q spectrum estimation and the quantities around it: moment sums,
 *        Fekete upper bounds, Legendre transform, multifractal counts,
 *        Frostman exponents, Garsia-type entropies and Fourier products.
 *
 * Logarithms are base 2 throughout.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqdim/histogram.hpp"
#include "lqdim/measure.hpp"
#include "lqdim/numeric.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

// ---- moment sums -----------------------------------------------------------

struct MomentSum {
    long double log2_value = 0;    ///< log2 S_m
    std::optional<Rational> exact; ///< present for exact masses and integer q
    double value() const { return static_cast<double>(std::exp2l(log2_value)); }
};

/// S_m(μ, q) = Σ_J μ(J)^q over the nonempty bins of h.
inline MomentSum moment_sums(const DyadicHistogram& h, double q) {
    if (!(q > 1)) fail(ErrorKind::domain, "moment sums need q > 1");
    MomentSum s;
    if (h.exact_mass && is_small_integer(q)) {
        s.exact = exact_power_sum(*h.exact_mass, static_cast<unsigned>(q));
        s.log2_value = log2_rational(*s.exact);
    } else if (h.exact_mass) {
        s.log2_value = log2_power_sum(std::span<const Rational>(*h.exact_mass), q);
    } else {
        s.log2_value = log2_power_sum(std::span<const double>(h.mass), q);
    }
    return s;
}

// ---- tau estimation ----------------------------------------------------------

enum class TauMethod { atoms, histogram, automatic };

inline const char* to_string(TauMethod m) {
    switch (m) {
    case TauMethod::atoms: return "atoms";
    case TauMethod::histogram: return "histogram";
    case TauMethod::automatic: return "auto";
    }
    return "?";
}

inline TauMethod parse_method(const std::string& s) {
    if (s == "atoms") return TauMethod::atoms;
    if (s == "histogram") return TauMethod::histogram;
    if (s == "auto") return TauMethod::automatic;
    fail(ErrorKind::config, "unknown method '" + s + "' (atoms | histogram | auto)");
}

struct SpectrumOptions {
    std::vector<double> q_grid{2.0};
    std::vector<int> m_grid;
    TauMethod method = TauMethod::automatic;
    std::size_t atom_cap = default_atom_cap;
    std::size_t auto_atom_limit = std::size_t(1) << 17; ///< auto picks atoms when |I|^n stays below this
    double alpha_step = 0.1;
    InvariantHistogramOptions histogram;
};

struct SpectrumRow {
    double q = 0;
    std::vector<double> log2_S;       ///< per m
    std::vector<double> tau_m;        ///< -log2 S_m / m per m
    double tau_hat = 0;
    double D_hat = 0;
    double alpha_hat = 0;             ///< central difference of tau_hat, step alpha_step
    double fit_residual = 0;
    double sdim_q = 0;
    double predicted_D = 0;           ///< min(sdim_q, 1)
};

struct SpectrumEstimate {
    std::vector<int> m_grid;
    std::size_t fit_from = 0;         ///< first m-grid index used in the slope fit
    TauMethod method = TauMethod::atoms;
    int level_n = 0;                  ///< largest n used (atoms method)
    int histogram_iterations = 0;
    double histogram_residual = 0;
    std::vector<SpectrumRow> rows;
    std::vector<std::string> notes;
    std::vector<DyadicHistogram> histograms; ///< one per m-grid entry
};

/// n(m): smallest n with lambda^n <= 2^-m.
inline int level_for_scale(int m, double lambda) {
    return std::max(1, static_cast<int>(std::ceil(m / std::log2(1.0 / std::fabs(lambda)) - 1e-12)));
}

namespace detail {

inline std::vector<DyadicHistogram> histograms_by_atoms(const Wifs& w, const std::vector<int>& m_grid,
                                                        std::size_t cap, int& n_used) {
    double lambda = w.ratio().approx();
    std::vector<DyadicHistogram> out;
    DiscreteMeasure delta = DiscreteMeasure::delta_of(w);
    DiscreteMeasure mu = delta;
    Scalar power = w.ratio();
    int n = 1;
    for (int m : m_grid) {
        int need = level_for_scale(m, lambda);
        while (n < need) {
            mu = convolve(mu, scale(delta, power), cap);
            power *= w.ratio();
            ++n;
        }
        out.push_back(dyadic_bin(mu, m));
    }
    n_used = n;
    return out;
}

inline SpectrumRow fit_row(double q, const std::vector<DyadicHistogram>& hs, const std::vector<int>& m_grid,
                           std::size_t from) {
    SpectrumRow row;
    row.q = q;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        double l = static_cast<double>(moment_sums(hs[i], q).log2_value);
        row.log2_S.push_back(l);
        row.tau_m.push_back(m_grid[i] > 0 ? -l / m_grid[i] : 0.0);
        if (i >= from) {
            xs.push_back(m_grid[i]);
            ys.push_back(-l);
        }
    }
    LinearFit fit = least_squares(xs, ys);
    row.tau_hat = fit.slope;
    row.fit_residual = fit.residual;
    row.D_hat = row.tau_hat / (q - 1);
    return row;
}

} // namespace detail

/**
 * Estimate tau(q) on q_grid from S_m at the scales in m_grid. The slope of
 * -log2 S_m against m is fitted over the upper half of the m-grid.
 */
inline SpectrumEstimate estimate_tau(const Wifs& input, SpectrumOptions opts) {
    require_valid(input);
    if (!input.homogeneous()) fail(ErrorKind::unsupported, "measure pipelines need a homogeneous WIFS");
    if (opts.m_grid.empty()) fail(ErrorKind::domain, "empty m-grid");
    if (!std::is_sorted(opts.m_grid.begin(), opts.m_grid.end()) ||
        std::adjacent_find(opts.m_grid.begin(), opts.m_grid.end()) != opts.m_grid.end())
        fail(ErrorKind::domain, "m-grid must be strictly increasing");
    if (opts.m_grid.front() < 1) fail(ErrorKind::domain, "m-grid entries must be >= 1");
    for (double q : opts.q_grid)
        if (!(q > 1)) fail(ErrorKind::domain, "spectrum needs q > 1");

    Wifs w = normalize_to_unit(square_if_negative(input)).wifs;
    double lambda = w.ratio().approx();
    int m_max = opts.m_grid.back();
    int n_max = level_for_scale(m_max, lambda);

    SpectrumEstimate est;
    est.m_grid = opts.m_grid;
    est.fit_from = opts.m_grid.size() / 2;
    if (opts.m_grid.size() - est.fit_from < 2 && opts.m_grid.size() >= 2) est.fit_from = opts.m_grid.size() - 2;

    TauMethod method = opts.method;
    if (method == TauMethod::automatic) {
        double words = std::pow(static_cast<double>(w.size()), n_max);
        method = (w.is_exact() && words <= static_cast<double>(opts.auto_atom_limit)) ? TauMethod::atoms
                                                                                         : TauMethod::histogram;
    }
    est.method = method;
    if (method == TauMethod::atoms) {
        try {
            est.histograms = detail::histograms_by_atoms(w, opts.m_grid, opts.atom_cap, est.level_n);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::resource)
                fail(ErrorKind::resource, std::string(e.what()) + "; try --method histogram");
            throw;
        }
    } else {
        InvariantHistogramResult r = invariant_histogram(w, m_max, opts.histogram);
        est.histogram_iterations = r.iterations;
        est.histogram_residual = r.residual;
        if (!r.converged)
            est.notes.push_back("invariant histogram stopped at the iteration cap with residual " +
                                std::to_string(r.residual));
        for (int m : opts.m_grid) est.histograms.push_back(downsample(r.histogram, m));
    }
    est.notes.push_back("tau_hat estimates a liminf by a slope over the largest scales; inspect tau_m for drift");

    const double h = opts.alpha_step / 2;
    for (double q : opts.q_grid) {
        SpectrumRow row = detail::fit_row(q, est.histograms, opts.m_grid, est.fit_from);
        double lo_q = q - h > 1 ? q - h : q;
        SpectrumRow lo = detail::fit_row(lo_q, est.histograms, opts.m_grid, est.fit_from);
        SpectrumRow hi = detail::fit_row(q + h, est.histograms, opts.m_grid, est.fit_from);
        row.alpha_hat = (hi.tau_hat - lo.tau_hat) / (q + h - lo_q);
        DimensionReport dims = similarity_dimensions(input, q);
        row.sdim_q = dims.sdim_q;
        row.predicted_D = dims.predicted_Dq();
        est.rows.push_back(std::move(row));
    }
    return est;
}

/// Violations of concavity of tau_hat (second differences <= tol) and of monotonicity of D_hat.
inline std::vector<std::string> spectrum_shape_violations(const SpectrumEstimate& est, double concavity_tol = 0.02,
                                                          double monotone_tol = 0.01) {
    std::vector<std::string> out;
    const auto& r = est.rows;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        double d2 = r[i - 1].tau_hat - 2 * r[i].tau_hat + r[i + 1].tau_hat;
        if (d2 > concavity_tol)
            out.push_back("tau_hat second difference " + std::to_string(d2) + " at q = " + std::to_string(r[i].q));
    }
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (r[i + 1].D_hat > r[i].D_hat + monotone_tol)
            out.push_back("D_hat increases from " + std::to_string(r[i].D_hat) + " to " + std::to_string(r[i + 1].D_hat) +
                          " at q = " + std::to_string(r[i + 1].q));
    return out;
}

// ---- Fekete bounds ---------------------------------------------------------

struct FeketeBound {
    double q = 0;
    std::vector<double> L;           ///< L[n-1] = -log2 ‖μ_n‖_q^q
    std::vector<std::optional<Rational>> exact_norm; ///< ‖μ_n‖_q^q for integer q
    double tau_upper = 0;            ///< min_n L_n / (n log2(1/|lambda|))
    double D_upper = 0;
    int argmin_n = 0;
};

/// Pairs (n, m) violating L_{n+m} <= L_n + L_m + tol, and n violating L_{2n}/2n <= L_n/n + tol.
inline std::vector<std::string> subadditivity_violations(const FeketeBound& f, double tol = 1e-9) {
    std::vector<std::string> out;
    const auto& L = f.L;
    int N = static_cast<int>(L.size());
    for (int n = 1; n <= N; ++n)
        for (int m = 1; n + m <= N; ++m)
            if (L[n + m - 1] > L[n - 1] + L[m - 1] + tol)
                out.push_back("L_" + std::to_string(n + m) + " > L_" + std::to_string(n) + " + L_" + std::to_string(m));
    for (int n = 1; 2 * n <= N; ++n)
        if (L[2 * n - 1] / (2 * n) > L[n - 1] / n + tol) out.push_back("L_2n/2n > L_n/n at n = " + std::to_string(n));
    return out;
}

/// Per-level exact measures μ_1..μ_{n_max}.
inline std::vector<DiscreteMeasure> level_measures(const Wifs& w, int n_max, std::size_t cap = default_atom_cap) {
    require_valid(w);
    if (n_max < 1) fail(ErrorKind::domain, "n_max must be >= 1");
    const Scalar& lambda = w.ratio();
    std::vector<DiscreteMeasure> out;
    DiscreteMeasure delta = DiscreteMeasure::delta_of(w);
    out.push_back(delta);
    Scalar power = lambda;
    for (int n = 2; n <= n_max; ++n) {
        out.push_back(convolve(out.back(), scale(delta, power), cap));
        power *= lambda;
    }
    return out;
}

inline FeketeBound fekete_from_levels(const std::vector<DiscreteMeasure>& mus, double q, double lambda) {
    FeketeBound f;
    f.q = q;
    double ll = std::log2(1.0 / std::fabs(lambda));
    f.tau_upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mus.size(); ++i) {
        auto masses = mus[i].masses();
        std::optional<Rational> exact;
        long double l;
        if (is_small_integer(q)) {
            exact = exact_power_sum(masses, static_cast<unsigned>(q));
            l = -log2_rational(*exact);
        } else {
            l = -log2_power_sum(std::span<const Rational>(masses), q);
        }
        f.L.push_back(static_cast<double>(l));
        f.exact_norm.push_back(exact);
        double b = static_cast<double>(l) / (static_cast<double>(i + 1) * ll);
        if (b < f.tau_upper) {
            f.tau_upper = b;
            f.argmin_n = static_cast<int>(i + 1);
        }
    }
    f.D_upper = f.tau_upper / (q - 1);
    return f;
}

/**
 * Certified upper bounds tau(q) <= L_n / (n log2(1/|lambda|)); merging atoms
 * only increases q-norms, which makes L_n subadditive.
 */
inline std::vector<FeketeBound> fekete_bounds(const Wifs& w, const std::vector<double>& qs, int n_max,
                                              std::size_t cap = default_atom_cap) {
    require_valid(w);
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "Fekete bounds need a homogeneous WIFS");
    if (!w.is_exact()) fail(ErrorKind::unsupported, "Fekete bounds need exact scalars");
    for (double q : qs)
        if (!(q > 1)) fail(ErrorKind::domain, "Fekete bounds need q > 1");
    auto mus = level_measures(w, n_max, cap);
    std::vector<FeketeBound> out;
    for (double q : qs) out.push_back(fekete_from_levels(mus, q, w.ratio().approx()));
    return out;
}

// ---- Legendre transform --------------------------------------------------------

struct LemmaCheck {
    double q = 0;
    double alpha = 0;
    double tau_star = 0;
    bool applies = false; ///< tau(q) < q - 1
    bool holds = true;    ///< tau*(alpha) <= alpha
};

struct LegendreResult {
    std::vector<double> q;
    std::vector<double> tau;
    std::vector<double> envelope;  ///< least concave majorant of tau (with tau(1) = 0) on the grid
    std::vector<double> alpha_hat; ///< envelope slope at each grid q (a supergradient)
    std::vector<double> alpha;
    std::vector<double> tau_star;
    std::vector<LemmaCheck> lemma;
    bool duality_holds = true;     ///< tau*(alpha) + tau(q) <= alpha q on every grid pair
};

namespace detail {

/// Upper concave hull through the anchor (1, 0), evaluated at xs.
inline std::vector<double> concave_majorant(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<std::pair<double, double>> pts{{1.0, 0.0}};
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto [x1, y1] = hull[hull.size() - 2];
            auto [x2, y2] = hull.back();
            // drop the middle point when it lies on or below the chord
            if ((y2 - y1) * (p.first - x1) <= (p.second - y1) * (x2 - x1))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<double> out;
    for (double x : xs) {
        std::size_t k = 1;
        while (k + 1 < hull.size() && hull[k].first < x) ++k;
        auto [x1, y1] = hull[k - 1];
        auto [x2, y2] = hull[k];
        out.push_back(x2 == x1 ? std::max(y1, y2) : y1 + (y2 - y1) * (x - x1) / (x2 - x1));
    }
    return out;
}

} // namespace detail

inline double legendre_at(double alpha, const std::vector<double>& q, const std::vector<double>& tau) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.size(); ++i) best = std::min(best, alpha * q[i] - tau[i]);
    return best;
}

/**
 * tau*(alpha) = min over grid q of alpha q - tau~(q), where tau~ is the least
 * concave majorant of the samples. An empty alpha grid defaults to the
 * envelope slopes.
 */
inline LegendreResult legendre_transform(const std::vector<double>& q, const std::vector<double>& tau,
                                         std::vector<double> alpha_grid = {}) {
    if (q.size() != tau.size()) fail(ErrorKind::domain, "q and tau samples differ in length");
    if (q.size() < 3) fail(ErrorKind::domain, "Legendre transform needs at least 3 grid points");
    if (!std::is_sorted(q.begin(), q.end())) fail(ErrorKind::domain, "q-grid must be increasing");
    LegendreResult r;
    r.q = q;
    r.tau = tau;
    r.envelope = detail::concave_majorant(q, tau);
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) {
        double qa = i == 0 ? 1.0 : q[i - 1], ta = i == 0 ? 0.0 : r.envelope[i - 1];
        double qb = i + 1 < n ? q[i + 1] : q[i], tb = i + 1 < n ? r.envelope[i + 1] : r.envelope[i];
        if (i + 1 == n) {
            qb = q[i];
            tb = r.envelope[i];
        }
        r.alpha_hat.push_back((tb - ta) / (qb - qa));
    }
    if (alpha_grid.empty()) alpha_grid = r.alpha_hat;
    r.alpha = alpha_grid;
    for (double a : alpha_grid) r.tau_star.push_back(legendre_at(a, q, r.envelope));
    for (std::size_t k = 0; k < r.alpha.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (r.tau_star[k] + tau[i] > r.alpha[k] * q[i] + 1e-12 * (1 + std::fabs(r.alpha[k] * q[i])))
                r.duality_holds = false; // rounding slack only
    for (std::size_t i = 0; i < n; ++i) {
        LemmaCheck c;
        c.q = q[i];
        c.alpha = r.alpha_hat[i];
        c.tau_star = legendre_at(c.alpha, q, r.envelope);
        c.applies = tau[i] < q[i] - 1;
        c.holds = !c.applies || c.tau_star <= c.alpha + 1e-9;
        r.lemma.push_back(c);
    }
    return r;
}

// ---- multifractal counts -----------------------------------------------------

struct MultifractalBand {
    long index = 0;           ///< band [index delta, (index + 1) delta) in alpha
    std::size_t count = 0;    ///< N(alpha, m)
    double contribution = 0;  ///< Σ μ(J)^q over the band
    double mean_alpha = 0;
};

struct MultifractalCounts {
    int m = 0;
    double q = 0;
    double delta = 0;
    std::vector<MultifractalBand> bands;
    std::size_t nonempty_bins = 0;
    double S_m = 0;
    double dominant_alpha = 0;   ///< mean alpha of the band with the largest contribution
    double dominant_log2N_over_m = 0;
    bool count_identity = true;  ///< Σ N = #nonempty bins
    bool sum_identity = true;    ///< Σ contributions = S_m (relative 1e-12)
};

inline MultifractalCounts multifractal_counts(const DyadicHistogram& h, double q, double delta) {
    if (!(delta > 0)) fail(ErrorKind::domain, "band width must be positive");
    if (!(q > 1)) fail(ErrorKind::domain, "multifractal counts need q > 1");
    MultifractalCounts mc;
    mc.m = h.level;
    mc.q = q;
    mc.delta = delta;
    mc.nonempty_bins = h.size();
    const double m = std::max(1, h.level);
    struct Acc {
        std::size_t n = 0;
        CompensatedSum contrib, alpha;
    };
    std::map<long, Acc> acc;
    for (std::size_t i = 0; i < h.size(); ++i) {
        long double lm = h.exact_mass ? log2_rational((*h.exact_mass)[i]) : std::log2l(h.mass[i]);
        double alpha = h.level == 0 ? 0.0 : static_cast<double>(-lm / m);
        long b = static_cast<long>(std::floor(alpha / delta + 1e-12));
        Acc& a = acc[b];
        ++a.n;
        a.contrib.add(std::exp2l(q * lm));
        a.alpha.add(alpha);
    }
    std::size_t total = 0;
    CompensatedSum sum;
    double best = -1;
    for (auto& [b, a] : acc) {
        MultifractalBand band{b, a.n, static_cast<double>(a.contrib.value()),
                              static_cast<double>(a.alpha.value() / static_cast<long double>(a.n))};
        total += a.n;
        sum.add(a.contrib.value());
        if (band.contribution > best) {
            best = band.contribution;
            mc.dominant_alpha = band.mean_alpha;
            mc.dominant_log2N_over_m = std::log2(static_cast<double>(a.n)) / m;
        }
        mc.bands.push_back(band);
    }
    mc.S_m = moment_sums(h, q).value();
    mc.count_identity = total == h.size();
    mc.sum_identity = std::fabs(static_cast<double>(sum.value()) - mc.S_m) <= 1e-12 * mc.S_m;
    return mc;
}

// ---- Frostman ---------------------------------------------------------------------

/// (1 - 1/q) s; q = infinity gives s.
inline double frostman_exponent(double q, double s) {
    if (!(q > 1)) fail(ErrorKind::domain, "Frostman exponent needs q > 1");
    if (std::isinf(q)) return s;
    return (1 - 1 / q) * s;
}

struct FrostmanCheck {
    double exponent = 0;
    double constant = 0; ///< max_J μ(J) 2^{m exponent}
};

inline FrostmanCheck frostman_check(const DyadicHistogram& h, double q, double s) {
    FrostmanCheck c;
    c.exponent = frostman_exponent(q, s);
    double top = h.mass.empty() ? 0.0 : *std::max_element(h.mass.begin(), h.mass.end());
    c.constant = top * std::exp2(h.level * c.exponent);
    return c;
}

// ---- Garsia entropy ---------------------------------------------------------------

struct GarsiaQ {
    double q = 0;
    std::vector<double> L;        ///< -log2 ‖μ_n‖_q^q
    std::vector<double> T_n;      ///< L_n / n
    double T = 0;                 ///< min_n L_n / n
    double D_estimate = 0;        ///< min(T / ((q-1) log2(1/|lambda|)), 1)
    double sdim_q = 0;
    std::vector<std::optional<Rational>> exact_norm;
};

struct GarsiaReport {
    double lambda = 0;
    std::vector<std::size_t> atoms; ///< atom count of μ_n
    std::vector<double> H;          ///< H(μ_n) bits
    std::vector<double> H_over_n;
    double h = 0;                   ///< min_n H_n / n
    double hdim_estimate = 0;       ///< min(h / log2(1/|lambda|), 1)
    double sdim = 0;
    std::optional<int> overlap_level; ///< first n with fewer than |I|^n atoms
    std::vector<GarsiaQ> per_q;
};

/// Garsia report from precomputed μ_1..μ_n.
inline GarsiaReport garsia_from_levels(const Wifs& w, const std::vector<DiscreteMeasure>& mus,
                                       const std::vector<double>& qs) {
    require_valid(w);
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "Garsia entropy needs a homogeneous WIFS");
    if (!w.is_exact()) fail(ErrorKind::unsupported, "Garsia entropy needs exact scalars");
    for (double q : qs)
        if (!(q > 1)) fail(ErrorKind::domain, "Garsia L^q entropies need q > 1");
    GarsiaReport g;
    g.lambda = w.ratio().approx();
    double ll = std::log2(1.0 / std::fabs(g.lambda));
    g.sdim = similarity_dimensions(w, 2.0).sdim;
    g.h = std::numeric_limits<double>::infinity();
    double words = 1;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        int n = static_cast<int>(i + 1);
        words *= static_cast<double>(w.size());
        g.atoms.push_back(mus[i].size());
        if (!g.overlap_level && static_cast<double>(mus[i].size()) < words) g.overlap_level = n;
        double H = entropy(mus[i]);
        g.H.push_back(H);
        g.H_over_n.push_back(H / n);
        g.h = std::min(g.h, H / n);
    }
    g.hdim_estimate = std::min(g.h / ll, 1.0);
    for (double q : qs) {
        FeketeBound f = fekete_from_levels(mus, q, g.lambda);
        GarsiaQ gq;
        gq.q = q;
        gq.L = f.L;
        gq.exact_norm = f.exact_norm;
        gq.T = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < f.L.size(); ++i) {
            gq.T_n.push_back(f.L[i] / static_cast<double>(i + 1));
            gq.T = std::min(gq.T, gq.T_n.back());
        }
        gq.D_estimate = std::min(gq.T / ((q - 1) * ll), 1.0);
        gq.sdim_q = similarity_dimensions(w, q).sdim_q;
        g.per_q.push_back(std::move(gq));
    }
    return g;
}

inline GarsiaReport garsia(const Wifs& w, const std::vector<double>& qs, int n_max, std::size_t cap = default_atom_cap) {
    require_valid(w);
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "Garsia entropy needs a homogeneous WIFS");
    return garsia_from_levels(w, level_measures(w, n_max, cap), qs);
}

// ---- Fourier transform ------------------------------------------------------------

struct FourierSample {
    double xi = 0;
    double modulus = 0;     ///< Π_{j<n} |Δ^(lambda^j xi)|
    double truncation = 0;  ///< expm1(2π|xi| spread |lambda|^n / (1 - |lambda|))
};

/// |Δ^(ξ)| with Δ^(ξ) = Σ p_i exp(2πi t_i ξ).
inline double delta_hat_modulus(const std::vector<double>& p, const std::vector<double>& t, double xi) {
    std::complex<double> s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::polar(1.0, 2 * M_PI * t[i] * xi);
    return std::abs(s);
}

inline std::vector<FourierSample> fourier_modulus(const Wifs& w, const std::vector<double>& xis, int n_trunc) {
    require_valid(w);
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "Fourier products need a homogeneous WIFS");
    if (n_trunc < 1) fail(ErrorKind::domain, "truncation length must be >= 1");
    std::vector<double> p = w.weights_double(), t;
    for (const auto& f : w.maps) t.push_back(f.translation.approx());
    double lambda = w.ratio().approx();
    double spread = *std::max_element(t.begin(), t.end()) - *std::min_element(t.begin(), t.end());
    double al = std::fabs(lambda);
    std::vector<FourierSample> out;
    for (double xi : xis) {
        FourierSample s;
        s.xi = xi;
        double prod = 1, scale_j = 1;
        for (int j = 0; j < n_trunc; ++j) {
            prod *= delta_hat_modulus(p, t, scale_j * xi);
            scale_j *= lambda;
        }
        s.modulus = prod;
        s.truncation = std::expm1(2 * M_PI * std::fabs(xi) * spread * std::pow(al, n_trunc) / (1 - al));
        out.push_back(s);
    }
    return out;
}

} // namespace lqdim
