#pragma once

/**
 * @file cli.hpp
 * @brief Run configuration and subcommand dispatch behind the lqdim executable.
 *
 * Exit codes: 0 ok, 1 other failure, 2 configuration error, 3 resource
 * limit, 4 invariant violation (the report is still written).
 */

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lqdim/cache.hpp"
#include "lqdim/flatten.hpp"
#include "lqdim/intersect.hpp"
#include "lqdim/json_io.hpp"
#include "lqdim/report.hpp"
#include "lqdim/separation.hpp"
#include "lqdim/spectrum.hpp"

namespace lqdim {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_resource = 3, exit_invariant = 4 };

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"analyze", "spectrum", "garsia", "separation", "flatten", "intersect"};
    return names;
}

struct RunConfig {
    std::string command;
    // WIFS source, first match wins: wifs_json, wifs_file, preset, lambda
    std::string preset;
    std::string lambda;
    std::string wifs_json;
    std::string wifs_file;
    // numeric knobs
    std::vector<double> q;
    std::string q_grid; ///< "start:stop:step", inclusive
    int m_max = 0;
    std::string m_grid; ///< "a:b" or "a,b,c"
    int n_max = 12;
    int k_max = 10;
    int D = 8;
    int ell = 3;
    std::string S = "even"; ///< "even", "odd", "all", "none" or a list "0,2"
    int p = 3;
    std::vector<int> digits{0, 2};
    int n = 9;
    std::string t = "sqrt(2)";
    std::string u = "0";
    double eps = 0; ///< 0: p^-n
    // output and execution
    std::string format = "json";
    std::string output;
    std::string cache_dir;
    int threads = 1;
    std::string method = "auto";
};

namespace detail {

inline std::vector<double> parse_q_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(ErrorKind::config, "cannot parse q-grid '" + spec + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0])
        fail(ErrorKind::config, "q-grid must be start:stop:step with step > 0");
    std::vector<double> out;
    const long count = std::lround((parts[1] - parts[0]) / parts[2]) + 1;
    if (count > 10000) fail(ErrorKind::config, "q-grid too long");
    for (long i = 0; i < count; ++i) out.push_back(std::round((parts[0] + i * parts[2]) * 1e9) / 1e9);
    return out;
}

inline std::vector<int> parse_int_list(const std::string& spec, const char* what) {
    std::vector<int> out;
    auto colon = spec.find(':');
    try {
        if (colon != std::string::npos) {
            int a = std::stoi(spec.substr(0, colon)), b = std::stoi(spec.substr(colon + 1));
            if (b < a || b - a > 100000) fail(ErrorKind::config, std::string("bad range for ") + what);
            for (int x = a; x <= b; ++x) out.push_back(x);
            return out;
        }
    } catch (const std::logic_error&) {
        fail(ErrorKind::config, std::string("cannot parse ") + what + " '" + spec + "'");
    }
    return parse_digits(spec);
}

inline std::set<int> parse_levels(const std::string& spec, int ell) {
    std::set<int> S;
    if (spec == "none" || spec.empty()) return S;
    for (int s = 0; s < ell; ++s)
        if (spec == "all" || (spec == "even" && s % 2 == 0) || (spec == "odd" && s % 2 == 1)) S.insert(s);
    if (spec == "all" || spec == "even" || spec == "odd") return S;
    for (int s : parse_digits(spec)) {
        if (s < 0 || s >= ell) fail(ErrorKind::config, "level " + std::to_string(s) + " in S lies outside [0, ell)");
        S.insert(s);
    }
    return S;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, "invalid JSON in " + origin + ": " + e.what());
    }
}

} // namespace detail

/// Overlay the keys of a JSON config file onto cfg (flags given later take precedence in the front end).
inline void apply_config_json(RunConfig& cfg, const Json& j) {
    if (!j.is_object()) fail(ErrorKind::config, "config must be a JSON object");
    static const std::set<std::string> known{"command", "preset", "lambda", "wifs",   "wifs_file", "q",      "q_grid",
                                             "m_max",   "m_grid", "n_max",  "k_max",  "D",         "ell",    "S",
                                             "p",       "digits", "n",      "t",      "u",         "eps",    "format",
                                             "output",  "cache_dir", "threads", "method"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) fail(ErrorKind::config, "unknown config key '" + it.key() + "'");
    try {
        auto str = [&](const char* key, std::string& dst) {
            if (!j.contains(key)) return;
            const Json& v = j[key];
            dst = v.is_string() ? v.get<std::string>() : v.dump();
        };
        str("command", cfg.command);
        str("preset", cfg.preset);
        str("lambda", cfg.lambda);
        if (j.contains("wifs")) cfg.wifs_json = j["wifs"].dump();
        str("wifs_file", cfg.wifs_file);
        if (j.contains("q")) cfg.q = j["q"].is_array() ? j["q"].get<std::vector<double>>() : std::vector<double>{j["q"].get<double>()};
        str("q_grid", cfg.q_grid);
        if (j.contains("m_max")) cfg.m_max = j["m_max"].get<int>();
        str("m_grid", cfg.m_grid);
        if (j.contains("n_max")) cfg.n_max = j["n_max"].get<int>();
        if (j.contains("k_max")) cfg.k_max = j["k_max"].get<int>();
        if (j.contains("D")) cfg.D = j["D"].get<int>();
        if (j.contains("ell")) cfg.ell = j["ell"].get<int>();
        str("S", cfg.S);
        if (j.contains("p")) cfg.p = j["p"].get<int>();
        if (j.contains("digits")) cfg.digits = j["digits"].get<std::vector<int>>();
        if (j.contains("n")) cfg.n = j["n"].get<int>();
        str("t", cfg.t);
        str("u", cfg.u);
        if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
        str("format", cfg.format);
        str("output", cfg.output);
        str("cache_dir", cfg.cache_dir);
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
        str("method", cfg.method);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("bad value in config: ") + e.what());
    }
}

inline Wifs resolve_wifs(const RunConfig& cfg) {
    if (!cfg.wifs_json.empty()) return wifs_from_json(detail::parse_json_text(cfg.wifs_json, "--wifs"));
    if (!cfg.wifs_file.empty())
        return wifs_from_json(detail::parse_json_text(detail::read_file(cfg.wifs_file), cfg.wifs_file));
    if (!cfg.preset.empty()) {
        if (cfg.preset == "bernoulli") {
            if (cfg.lambda.empty()) fail(ErrorKind::config, "preset bernoulli needs --lambda");
            return preset("bernoulli:" + cfg.lambda);
        }
        return preset(cfg.preset);
    }
    if (!cfg.lambda.empty()) return bernoulli(parse_scalar(cfg.lambda));
    fail(ErrorKind::config, "no WIFS given (use --preset, --lambda, --wifs or --wifs-file)");
}

namespace detail {

struct Context {
    const RunConfig& cfg;
    std::vector<std::string> violations;
    std::optional<MeasureCache> cache;

    std::vector<double> q_list(std::vector<double> fallback) const {
        std::vector<double> qs = !cfg.q.empty() ? cfg.q : !cfg.q_grid.empty() ? parse_q_grid(cfg.q_grid) : fallback;
        for (double q : qs)
            if (!(q > 1)) fail(ErrorKind::config, "q must exceed 1, got " + std::to_string(q));
        return qs;
    }

    std::vector<int> m_list(int fallback_max, bool full_range = true) const {
        if (!cfg.m_grid.empty()) return parse_int_list(cfg.m_grid, "m-grid");
        int m = cfg.m_max > 0 ? cfg.m_max : fallback_max;
        if (m < 1 || m > 26) fail(ErrorKind::config, "m-max must lie in [1, 26]");
        if (!full_range) return {m};
        std::vector<int> out;
        for (int i = 1; i <= m; ++i) out.push_back(i);
        return out;
    }
};

inline void check_moment_bounds(Context& ctx, const SpectrumEstimate& est) {
    for (const auto& row : est.rows)
        for (std::size_t i = 0; i < est.m_grid.size(); ++i) {
            double lo = (1 - row.q) * est.m_grid[i], l = row.log2_S[i];
            if (l > 1e-9 || l < lo - 1e-9)
                ctx.violations.push_back("S_m outside [2^{(1-q)m}, 1] at q = " + std::to_string(row.q) +
                                         ", m = " + std::to_string(est.m_grid[i]));
        }
}

inline Json spectrum_section(Context& ctx, const Wifs& w, std::vector<double> qs, bool with_legendre) {
    SpectrumOptions opts;
    opts.q_grid = std::move(qs);
    opts.m_grid = ctx.m_list(16);
    opts.method = parse_method(ctx.cfg.method);
    SpectrumEstimate est = estimate_tau(w, opts);
    check_moment_bounds(ctx, est);
    Json j = to_json(est);
    auto shape = spectrum_shape_violations(est);
    j["shape_violations"] = shape;
    for (auto& v : shape) ctx.violations.push_back(v);
    if (with_legendre && est.rows.size() >= 3) {
        std::vector<double> q, tau;
        for (const auto& r : est.rows) {
            q.push_back(r.q);
            tau.push_back(r.tau_hat);
        }
        LegendreResult lt = legendre_transform(q, tau);
        if (!lt.duality_holds) ctx.violations.push_back("Legendre duality failed");
        j["legendre"] = to_json(lt);
    }
    return j;
}

inline void spectrum_csv(std::ostream& os, const Json& spectrum) {
    os << "q,m,S_m,tau_hat,D_hat\n";
    char buf[160];
    for (const auto& row : spectrum["rows"])
        for (const auto& pm : row["per_m"]) {
            std::snprintf(buf, sizeof buf, "%.10g,%d,%.17g,%.17g,%.17g\n", row["q"].get<double>(), pm["m"].get<int>(),
                          std::exp2(pm["log2_S"].get<double>()), row["tau_hat"].get<double>(),
                          row["D_hat"].get<double>());
            os << buf;
        }
}

inline Json run_analyze(Context& ctx, std::ostringstream& csv) {
    Wifs w = resolve_wifs(ctx.cfg);
    require_valid(w);
    std::vector<double> qs = ctx.q_list({2.0});
    Json j;
    j["wifs"] = wifs_to_json(w);
    j["homogeneous"] = w.homogeneous();
    Json dims = Json::array();
    for (double q : qs) dims.push_back(to_json(similarity_dimensions(w, q)));
    j["dimensions"] = dims;
    if (!w.homogeneous()) {
        j["notes"] = Json::array({"symbolic dimensions only: the measure pipelines need a homogeneous WIFS"});
        return j;
    }
    j["spectrum"] = spectrum_section(ctx, w, qs, true);
    if (ctx.cfg.format == "csv") spectrum_csv(csv, j["spectrum"]);
    return j;
}

inline Json run_spectrum(Context& ctx, std::ostringstream& csv) {
    Wifs w = resolve_wifs(ctx.cfg);
    require_valid(w);
    std::vector<double> qs = ctx.q_list(parse_q_grid("1.2:6:0.2"));
    Json j;
    j["wifs"] = wifs_to_json(w);
    j["spectrum"] = spectrum_section(ctx, w, qs, true);
    if (ctx.cfg.format == "csv") spectrum_csv(csv, j["spectrum"]);
    return j;
}

inline Json run_garsia(Context& ctx, std::ostringstream& csv) {
    Wifs w = resolve_wifs(ctx.cfg);
    require_valid(w);
    if (ctx.cfg.n_max < 1 || ctx.cfg.n_max > 64) fail(ErrorKind::config, "n-max must lie in [1, 64]");
    std::vector<double> qs = ctx.q_list({2.0});
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "garsia needs a homogeneous WIFS");
    auto mus = cached_level_measures(w, ctx.cfg.n_max, ctx.cache);
    GarsiaReport g = garsia_from_levels(w, mus, qs);
    Json j;
    j["wifs"] = wifs_to_json(w);
    j["garsia"] = to_json(g);
    Json fekete = Json::array();
    for (double q : qs) {
        FeketeBound f = fekete_from_levels(mus, q, w.ratio().approx());
        for (auto& v : subadditivity_violations(f)) ctx.violations.push_back("q = " + std::to_string(q) + ": " + v);
        fekete.push_back(to_json(f));
    }
    j["fekete"] = fekete;
    std::vector<double> xis;
    double lam = std::fabs(w.ratio().approx());
    for (int k = 0; k <= 12; ++k) xis.push_back(std::pow(1 / lam, k));
    Json fourier = Json::array();
    for (const auto& s : fourier_modulus(w, xis, 64))
        fourier.push_back(Json{{"xi", num(s.xi)}, {"modulus", num(s.modulus)}, {"truncation_bound", num(s.truncation)}});
    j["fourier_along_powers"] = fourier;
    if (ctx.cfg.format == "csv") {
        csv << "n,atoms,H";
        for (double q : qs) csv << ",L_q" << q;
        csv << "\n";
        for (std::size_t i = 0; i < g.H.size(); ++i) {
            csv << i + 1 << "," << g.atoms[i] << "," << g.H[i];
            for (const auto& pq : g.per_q) csv << "," << pq.L[i];
            csv << "\n";
        }
    }
    return j;
}

inline Json run_separation(Context& ctx, std::ostringstream& csv) {
    Wifs w = resolve_wifs(ctx.cfg);
    require_valid(w);
    if (ctx.cfg.k_max < 1 || ctx.cfg.k_max > 64) fail(ErrorKind::config, "k-max must lie in [1, 64]");
    SeparationReport rep = separation_report(w, ctx.cfg.k_max);
    for (std::size_t i = 1; i < rep.gamma.size(); ++i)
        if (rep.gamma[i].value.is_exact() && compare(rep.gamma[i].value, rep.gamma[i - 1].value) > 0)
            ctx.violations.push_back("Gamma_" + std::to_string(i + 1) + " > Gamma_" + std::to_string(i));
    if (rep.certificate && rep.certificate->issued && rep.certificate->overlap_checked) {
        const auto& last = rep.gamma.back();
        if (compare(last.value, Scalar(rep.certificate->bound)) < 0)
            ctx.violations.push_back("enumerated Gamma_k below the certified bound");
    }
    Json j;
    j["wifs"] = wifs_to_json(w);
    Json body = to_json(rep);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    if (ctx.cfg.format == "csv") {
        csv << "k,gamma,overlap\n";
        for (const auto& g : rep.gamma) csv << g.k << "," << g.value.to_string() << "," << (g.overlap ? 1 : 0) << "\n";
    }
    return j;
}

inline Json run_flatten(Context& ctx, std::ostringstream& csv) {
    const RunConfig& cfg = ctx.cfg;
    Wifs w = resolve_wifs(cfg);
    require_valid(w);
    if (!w.homogeneous()) fail(ErrorKind::unsupported, "flatten needs a homogeneous WIFS");
    std::vector<double> qs = ctx.q_list({2.0});
    if (qs.size() != 1) fail(ErrorKind::config, "flatten takes a single q");
    const double q = qs[0];
    std::vector<int> ms = ctx.m_list(14, false);
    for (int m : ms)
        if (m < 1 || m > 20) fail(ErrorKind::config, "flatten supports 1 <= m <= 20");
    SpectrumOptions opts;
    opts.m_grid = ms;
    opts.method = parse_method(cfg.method);
    SpectrumEstimate est = estimate_tau(w, opts);
    Json sweep = Json::array();
    if (cfg.format == "csv") csv << "m,rho,sigma_hat,eps_hat\n";
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const int m = ms[i];
        GridMeasure mu = GridMeasure::from_histogram(est.histograms[i]);
        std::vector<std::pair<std::string, GridMeasure>> rhos{{"delta0", GridMeasure::dirac(m)},
                                                              {"uniform", GridMeasure::uniform(m)},
                                                              {"obstruction", obstruction_measure(m)}};
        for (auto& [name, rho] : rhos) {
            FlatteningResult f = flattening_ratio(rho, mu, q);
            if (f.log2_ratio > 1e-12) ctx.violations.push_back("Young bound failed for rho = " + name);
            Json row{{"m", m}, {"rho", name}};
            const Json fj = to_json(f);
            for (auto it = fj.begin(); it != fj.end(); ++it) row[it.key()] = it.value();
            if (name == "obstruction") row["eps_norm_ceiling"] = num(std::ceil(0.1 * m - 1e-12) / m);
            sweep.push_back(row);
            if (cfg.format == "csv") csv << m << "," << name << "," << f.sigma_hat << "," << f.eps_hat << "\n";
        }
    }
    Json j;
    j["wifs"] = wifs_to_json(w);
    j["q"] = num(q);
    j["mu_method"] = to_string(est.method);
    j["sweep"] = sweep;
    if (cfg.D < 1 || cfg.ell < 1) fail(ErrorKind::config, "D and ell must be >= 1");
    std::set<int> S = parse_levels(cfg.S, cfg.ell);
    GridMeasure tree = build_tree_measure(cfg.D, cfg.ell, S);
    BranchingProfile bp = regularity_check(tree.index, tree.m, cfg.D);
    for (int s = 0; s < cfg.ell; ++s) {
        std::uint64_t want = S.count(s) ? (std::uint64_t(1) << cfg.D) : 1;
        if (!bp.regular || bp.R[static_cast<std::size_t>(s)] != want)
            ctx.violations.push_back("tree measure is not regular with the constructed R at level " + std::to_string(s));
    }
    TreeConvolutionReport tc = tree_self_convolution_check(cfg.D, cfg.ell, S, q);
    j["tree"] = Json{{"D", cfg.D}, {"ell", cfg.ell}, {"S", std::vector<int>(S.begin(), S.end())},
                     {"regularity", to_json(bp)}, {"self_convolution", to_json(tc)}};
    j["notes"] = Json::array({"convolutions are taken on the line, supported on [0,2), not on the circle",
                              "eps_hat compares q-th powers of q-norms; eps_hat_norm = eps_hat/q compares the norms"});
    return j;
}

inline Json run_intersect(Context& ctx, std::ostringstream& csv) {
    const RunConfig& cfg = ctx.cfg;
    int p = cfg.p;
    std::vector<int> digits = cfg.digits;
    if (!cfg.preset.empty()) {
        auto parts = cfg.preset;
        if (parts.rfind("p_cantor:", 0) != 0) fail(ErrorKind::config, "intersect takes a p_cantor preset");
        std::stringstream ss(parts);
        std::string name, ps, ds;
        std::getline(ss, name, ':');
        std::getline(ss, ps, ':');
        std::getline(ss, ds, ':');
        try {
            p = std::stoi(ps);
        } catch (const std::exception&) {
            fail(ErrorKind::config, "bad p in preset '" + parts + "'");
        }
        digits = parse_digits(ds);
    }
    if (cfg.n < 1 || cfg.n > 12) fail(ErrorKind::config, "intersect supports 1 <= n <= 12");
    Scalar t = parse_scalar(cfg.t), u = parse_scalar(cfg.u);
    std::optional<double> eps;
    if (cfg.eps > 0) eps = cfg.eps;
    FiberReport fr = fiber_count(p, digits, cfg.n, t, u, eps);
    if (!fr.lemma_bound_holds) ctx.violations.push_back("fiber count exceeds the calibrated Frostman bound");
    IntersectionBound ib = intersection_bound(p, digits);
    Json j;
    j["fiber"] = to_json(fr);
    j["intersection_bound"] = Json{{"s", num(ib.s)}, {"bound", num(ib.bound)},
                                   {"claimed", fr.irrational_claim}};
    Wifs proj = projected_product(p, digits, t);
    int k_max = std::min(cfg.k_max, 5);
    SeparationReport sep = separation_report(proj, k_max);
    j["projected_separation"] = to_json(sep);
    if (cfg.format == "csv") {
        csv << "p,n,t,u,eps,N,alpha_hat,C,bound\n";
        csv << p << "," << cfg.n << "," << fr.t << "," << fr.u << "," << fr.eps << "," << fr.N << "," << fr.alpha_hat
            << "," << fr.C << "," << ib.bound << "\n";
    }
    return j;
}

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::domain:
    case ErrorKind::unsupported:
    case ErrorKind::field_mismatch: return exit_config;
    case ErrorKind::resource: return exit_resource;
    case ErrorKind::validation: return exit_invariant;
    default: return exit_failure;
    }
}

inline void write_once(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        out.flush();
        return;
    }
    std::filesystem::path target(path), tmp(path + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) fail(ErrorKind::io, "cannot write '" + tmp.string() + "'");
        f << text;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) fail(ErrorKind::io, "cannot move report into place: " + ec.message());
}

} // namespace detail

/// Execute one subcommand; the report goes to cfg.output or `out`, diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (std::find(subcommands().begin(), subcommands().end(), cfg.command) == subcommands().end())
            fail(ErrorKind::config, "unknown subcommand '" + cfg.command + "'");
        if (cfg.format != "json" && cfg.format != "csv") fail(ErrorKind::config, "format must be json or csv");
        if (cfg.threads < 1) fail(ErrorKind::config, "threads must be >= 1");
        detail::Context ctx{cfg, {}, MeasureCache::from_environment(cfg.cache_dir)};
        std::ostringstream csv;
        Json body;
        if (cfg.command == "analyze") body = detail::run_analyze(ctx, csv);
        else if (cfg.command == "spectrum") body = detail::run_spectrum(ctx, csv);
        else if (cfg.command == "garsia") body = detail::run_garsia(ctx, csv);
        else if (cfg.command == "separation") body = detail::run_separation(ctx, csv);
        else if (cfg.command == "flatten") body = detail::run_flatten(ctx, csv);
        else body = detail::run_intersect(ctx, csv);

        Json report{{"schema", "1"}, {"command", cfg.command}};
        for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
        report["invariant_violations"] = ctx.violations;
        report["status"] = ctx.violations.empty() ? "ok" : "invariant-violation";
        detail::write_once(cfg.output, cfg.format == "csv" ? csv.str() : report.dump(2) + "\n", out);
        if (!ctx.violations.empty()) {
            for (const auto& v : ctx.violations) err << "invariant violation: " << v << "\n";
            return exit_invariant;
        }
        return exit_ok;
    } catch (const Error& e) {
        err << "lqdim: " << e.what() << "\n";
        if (e.kind() == ErrorKind::resource) err << "hint: lower the level, raise the cap, or switch --method\n";
        return detail::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "lqdim: " << e.what() << "\n";
        return exit_failure;
    }
}

} // namespace lqdim
