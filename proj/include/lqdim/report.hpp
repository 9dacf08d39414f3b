#pragma once

/**
 * @file report.hpp
 * @brief JSON renderings of analysis records. Field order is fixed so reports are byte-stable.
 */

#include <cmath>
#include <string>
#include <vector>

#include "lqdim/flatten.hpp"
#include "lqdim/intersect.hpp"
#include "lqdim/json_io.hpp"
#include "lqdim/separation.hpp"
#include "lqdim/spectrum.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

/// Finite doubles as numbers, everything else as null.
inline Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json word_to_json(const Word& w) {
    Json a = Json::array();
    for (int x : w) a.push_back(x);
    return a;
}

inline Json to_json(const DimensionReport& d) {
    return Json{{"q", num(d.q)},
                {"entropy_bits", num(d.entropy)},
                {"lyapunov_bits", num(d.lyapunov)},
                {"sdim", num(d.sdim)},
                {"sdim_clipped", d.sdim_clipped},
                {"T", num(d.T)},
                {"T_residual", num(d.residual)},
                {"sdim_q", num(d.sdim_q)},
                {"sdim_q_clipped", d.sdim_q_clipped},
                {"predicted_D", num(d.predicted_Dq())}};
}

inline Json to_json(const SpectrumEstimate& e) {
    Json rows = Json::array();
    for (const auto& r : e.rows) {
        Json per_m = Json::array();
        for (std::size_t i = 0; i < e.m_grid.size(); ++i)
            per_m.push_back(Json{{"m", e.m_grid[i]}, {"log2_S", num(r.log2_S[i])}, {"tau_m", num(r.tau_m[i])}});
        rows.push_back(Json{{"q", num(r.q)},
                            {"tau_hat", num(r.tau_hat)},
                            {"D_hat", num(r.D_hat)},
                            {"predicted_D", num(r.predicted_D)},
                            {"sdim_q", num(r.sdim_q)},
                            {"alpha_hat", num(r.alpha_hat)},
                            {"fit_residual", num(r.fit_residual)},
                            {"per_m", per_m}});
    }
    Json fit_m = Json::array();
    for (std::size_t i = e.fit_from; i < e.m_grid.size(); ++i) fit_m.push_back(e.m_grid[i]);
    Json j{{"method", to_string(e.method)}, {"fit_scales", fit_m}};
    if (e.method == TauMethod::atoms)
        j["level_n"] = e.level_n;
    else
        j["histogram"] = Json{{"iterations", e.histogram_iterations}, {"residual", num(e.histogram_residual)}};
    j["rows"] = rows;
    j["notes"] = e.notes;
    return j;
}

inline Json to_json(const LegendreResult& l) {
    Json samples = Json::array();
    for (std::size_t i = 0; i < l.alpha.size(); ++i) samples.push_back(Json{{"alpha", num(l.alpha[i])}, {"tau_star", num(l.tau_star[i])}});
    Json lemma = Json::array();
    for (const auto& c : l.lemma)
        lemma.push_back(Json{{"q", num(c.q)}, {"alpha", num(c.alpha)}, {"tau_star", num(c.tau_star)},
                             {"applies", c.applies}, {"holds", c.holds}});
    return Json{{"samples", samples}, {"duality_holds", l.duality_holds}, {"lemma_tau_star_le_alpha", lemma}};
}

inline Json to_json(const FeketeBound& f) {
    Json L = Json::array();
    for (std::size_t i = 0; i < f.L.size(); ++i) {
        Json row{{"n", i + 1}, {"L", num(f.L[i])}};
        if (f.exact_norm[i]) row["norm_q_pow_q"] = f.exact_norm[i]->get_str();
        L.push_back(row);
    }
    return Json{{"q", num(f.q)}, {"tau_upper", num(f.tau_upper)}, {"D_upper", num(f.D_upper)},
                {"argmin_n", f.argmin_n}, {"L", L}};
}

inline Json to_json(const GarsiaReport& g) {
    Json levels = Json::array();
    for (std::size_t i = 0; i < g.H.size(); ++i)
        levels.push_back(Json{{"n", i + 1}, {"atoms", g.atoms[i]}, {"H", num(g.H[i])}, {"H_over_n", num(g.H_over_n[i])}});
    Json per_q = Json::array();
    for (const auto& q : g.per_q) {
        Json L = Json::array();
        for (std::size_t i = 0; i < q.L.size(); ++i) {
            Json row{{"n", i + 1}, {"L", num(q.L[i])}, {"T_n", num(q.T_n[i])}};
            if (q.exact_norm[i]) row["norm_q_pow_q"] = q.exact_norm[i]->get_str();
            L.push_back(row);
        }
        per_q.push_back(Json{{"q", num(q.q)},
                             {"T", num(q.T)},
                             {"D_estimate", num(q.D_estimate)},
                             {"predicted_D", num(std::min(q.sdim_q, 1.0))},
                             {"levels", L}});
    }
    return Json{{"lambda", num(g.lambda)},
                {"h", num(g.h)},
                {"hdim_estimate", num(g.hdim_estimate)},
                {"predicted_dim", num(std::min(g.sdim, 1.0))},
                {"overlap_level", g.overlap_level ? Json(*g.overlap_level) : Json(nullptr)},
                {"levels", levels},
                {"per_q", per_q},
                {"notes", Json::array({"h is min_n H(mu_n)/n over the computed range, not a certified limit",
                                       "T is min_n L_n/n, an upper bound for the limit by subadditivity"})}};
}

inline Json to_json(const GammaRecord& r) {
    Json j{{"k", r.k}, {"value", scalar_to_json(r.value)}, {"value_approx", num(r.value.approx())}, {"overlap", r.overlap}};
    j["witness"] = r.witness ? Json::array({word_to_json(r.witness->first), word_to_json(r.witness->second)}) : Json(nullptr);
    if (r.no_equal_ratio_pair) j["no_equal_ratio_pair"] = true;
    return j;
}

inline Json to_json(const SeparationCertificate& c) {
    Json j{{"issued", c.issued}, {"k", c.k}};
    if (!c.issued) {
        j["refusal"] = c.refusal;
        return j;
    }
    j["den_lambda"] = c.den_lambda.get_str();
    j["den_t"] = c.den_t.get_str();
    j["bound"] = rational_to_json(c.bound);
    j["statement"] = "Gamma_k >= 1/(" + c.den_lambda.get_str() + "^(k-1) * " + c.den_t.get_str() +
                     ") for every k without exact overlap";
    j["delta"] = rational_to_json(c.delta);
    j["overlap_checked"] = c.overlap_checked;
    j["witness_numerator"] = c.witness_numerator ? Json(c.witness_numerator->get_str()) : Json(nullptr);
    return j;
}

inline Json to_json(const SeparationReport& r) {
    Json gamma = Json::array();
    for (const auto& g : r.gamma) gamma.push_back(to_json(g));
    return Json{{"gamma", gamma},
                {"delta_hat", num(r.delta_hat)},
                {"first_overlap", r.first_overlap ? Json(*r.first_overlap) : Json(nullptr)},
                {"certificate", r.certificate ? to_json(*r.certificate) : Json(nullptr)},
                {"notes", r.notes}};
}

inline Json to_json(const FlatteningResult& f) {
    return Json{{"log2_ratio", num(f.log2_ratio)}, {"eps_hat", num(f.eps_hat)}, {"eps_hat_norm", num(f.eps_hat_norm)},
                {"rho_norm_dual", num(f.rho_norm_dual)}, {"sigma_hat", num(f.sigma_hat)}};
}

inline Json to_json(const BranchingProfile& b) {
    Json j{{"D", b.D}, {"ell", b.ell}, {"R", b.R}, {"regular", b.regular},
           {"branching_set", std::vector<int>(b.branching_set.begin(), b.branching_set.end())}};
    if (b.witness)
        j["witness"] = Json{{"level", b.witness->level}, {"parent_a", b.witness->parent_a},
                            {"children_a", b.witness->children_a}, {"parent_b", b.witness->parent_b},
                            {"children_b", b.witness->children_b}};
    return j;
}

inline Json to_json(const TreeConvolutionReport& t) {
    Json j{{"log2_norm_mu", num(t.log2_norm_mu)}, {"log2_norm_conv", num(t.log2_norm_conv)}};
    if (t.exact_norm_conv) j["norm_conv_exact"] = t.exact_norm_conv->get_str();
    j["gap"] = num(t.gap);
    j["conv_branching"] = t.conv_branching ? to_json(*t.conv_branching) : Json(nullptr);
    return j;
}

inline Json to_json(const FiberReport& f) {
    return Json{{"p", f.p},
                {"digits", f.digits},
                {"t", f.t},
                {"u", f.u},
                {"n", f.n},
                {"eps", num(f.eps)},
                {"N", f.N},
                {"s", num(f.s)},
                {"s_hat", num(f.s_hat)},
                {"alpha_hat", num(f.alpha_hat)},
                {"C", num(f.C)},
                {"C_limit", num(f.C_limit)},
                {"lemma_bound_holds", f.lemma_bound_holds},
                {"box_dim_bound", num(f.theory_bound)},
                {"regime", f.regime},
                {"irrational_claim", f.irrational_claim},
                {"projected_overlap_level", f.projected_overlap_level ? Json(*f.projected_overlap_level) : Json(nullptr)},
                {"notes", f.notes}};
}

} // namespace lqdim
