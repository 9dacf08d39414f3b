/**
 * @file lqdim.cpp
 * @brief Command-line front end: parses flags and an optional JSON config, then hands off to lqdim::run.
 */

#include <CLI11.hpp>

#include <iostream>

#include "lqdim/cli.hpp"

namespace {

void add_common(CLI::App* sub, lqdim::RunConfig& cfg, std::string& config_file) {
    sub->add_option("--config", config_file, "JSON config file; flags override its keys");
    sub->add_option("--preset", cfg.preset, "cantor | golden | bernoulli | bernoulli:L | p_cantor:p:d,d | projected_product:p:d,d:t");
    sub->add_option("--lambda", cfg.lambda, "contraction ratio (2/3, golden, sqrt(2), 0.7)");
    sub->add_option("--wifs", cfg.wifs_json, "inline WIFS JSON");
    sub->add_option("--wifs-file", cfg.wifs_file, "path to a WIFS JSON file")->check(CLI::ExistingFile);
    sub->add_option("--q", cfg.q, "moment order(s) q > 1")->delimiter(',');
    sub->add_option("--q-grid", cfg.q_grid, "start:stop:step");
    sub->add_option("--m-max", cfg.m_max, "largest dyadic scale");
    sub->add_option("--m-grid", cfg.m_grid, "a:b or a,b,c");
    sub->add_option("--method", cfg.method, "atoms | histogram | auto");
    sub->add_option("--format", cfg.format, "json | csv");
    sub->add_option("-o,--output", cfg.output, "report path (default stdout)");
    sub->add_option("--cache-dir", cfg.cache_dir, "measure cache directory (LQDIM_CACHE_DIR overrides)");
    sub->add_option("--threads", cfg.threads, "parallelism degree");
}

} // namespace

int main(int argc, char** argv) {
    lqdim::RunConfig cfg;
    lqdim::RunConfig defaults;
    std::string config_file;

    CLI::App app{"lqdim: L^q dimensions of homogeneous self-similar measures"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "similarity dimensions plus the estimated spectrum at the given q");
    auto* spectrum = app.add_subcommand("spectrum", "tau(q), D(q) and the Legendre transform over a q-grid");
    auto* garsia = app.add_subcommand("garsia", "entropy and L^q tables of the level-n measures");
    auto* separation = app.add_subcommand("separation", "separation numbers, exact overlaps, rational certificates");
    auto* flatten = app.add_subcommand("flatten", "convolution flattening sweep and the tree example");
    auto* intersect = app.add_subcommand("intersect", "fiber counts for Cantor-set intersections with lines");
    for (auto* sub : {analyze, spectrum, garsia, separation, flatten, intersect}) add_common(sub, cfg, config_file);

    garsia->add_option("--n-max", cfg.n_max, "deepest level n");
    separation->add_option("--k-max", cfg.k_max, "deepest word length k");
    flatten->add_option("--D", cfg.D, "tree digit width");
    flatten->add_option("--ell", cfg.ell, "tree depth");
    flatten->add_option("--S", cfg.S, "branching levels: even | odd | all | none | 0,2,..");
    intersect->add_option("--p", cfg.p, "base");
    intersect->add_option("--digits", cfg.digits, "digit set")->delimiter(',');
    intersect->add_option("--n", cfg.n, "level (eps = p^-n)");
    intersect->add_option("--t", cfg.t, "slope");
    intersect->add_option("--u", cfg.u, "offset");
    intersect->add_option("--eps", cfg.eps, "scale override");
    intersect->add_option("--k-max", cfg.k_max, "word length for the projected-IFS separation check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : lqdim::exit_config;
    }

    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

    if (!config_file.empty()) {
        // Config keys fill in only what was not given on the command line.
        lqdim::RunConfig from_file = defaults;
        try {
            lqdim::apply_config_json(from_file, lqdim::detail::parse_json_text(lqdim::detail::read_file(config_file), config_file));
        } catch (const lqdim::Error& e) {
            std::cerr << "lqdim: " << e.what() << "\n";
            return lqdim::exit_config;
        }
        auto* sub = app.get_subcommands().front();
        auto given = [&](const char* flag) { return sub->count(flag) > 0; };
        if (!given("--preset")) cfg.preset = from_file.preset;
        if (!given("--lambda")) cfg.lambda = from_file.lambda;
        if (!given("--wifs")) cfg.wifs_json = from_file.wifs_json;
        if (!given("--wifs-file")) cfg.wifs_file = from_file.wifs_file;
        if (!given("--q")) cfg.q = from_file.q;
        if (!given("--q-grid")) cfg.q_grid = from_file.q_grid;
        if (!given("--m-max")) cfg.m_max = from_file.m_max;
        if (!given("--m-grid")) cfg.m_grid = from_file.m_grid;
        if (!given("--method")) cfg.method = from_file.method;
        if (!given("--format")) cfg.format = from_file.format;
        if (!given("--output")) cfg.output = from_file.output;
        if (!given("--cache-dir")) cfg.cache_dir = from_file.cache_dir;
        if (!given("--threads")) cfg.threads = from_file.threads;
        if (sub->get_option_no_throw("--n-max") && !given("--n-max")) cfg.n_max = from_file.n_max;
        if (sub->get_option_no_throw("--k-max") && !given("--k-max")) cfg.k_max = from_file.k_max;
        if (sub->get_option_no_throw("--D") && !given("--D")) cfg.D = from_file.D;
        if (sub->get_option_no_throw("--ell") && !given("--ell")) cfg.ell = from_file.ell;
        if (sub->get_option_no_throw("--S") && !given("--S")) cfg.S = from_file.S;
        if (sub->get_option_no_throw("--p") && !given("--p")) cfg.p = from_file.p;
        if (sub->get_option_no_throw("--digits") && !given("--digits")) cfg.digits = from_file.digits;
        if (sub->get_option_no_throw("--n") && !given("--n")) cfg.n = from_file.n;
        if (sub->get_option_no_throw("--t") && !given("--t")) cfg.t = from_file.t;
        if (sub->get_option_no_throw("--u") && !given("--u")) cfg.u = from_file.u;
        if (sub->get_option_no_throw("--eps") && !given("--eps")) cfg.eps = from_file.eps;
        if (!from_file.command.empty() && from_file.command != cfg.command) {
            std::cerr << "lqdim: config is for '" << from_file.command << "', not '" << cfg.command << "'\n";
            return lqdim::exit_config;
        }
    }

    return lqdim::run(cfg, std::cout, std::cerr);
}
