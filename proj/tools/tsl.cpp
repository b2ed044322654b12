// Command-line front end: spectrum tables, nonlinear runs, stability sweeps,
// verification experiments and the Besov certifiers. Outputs are CSV / JSON
// plus two-column .dat files under --out (TSL_OUT overrides).

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>

#include "tsl/config.hpp"
#include "tsl/experiments.hpp"

using namespace tsl;

int main(int argc, char** argv) {
    CLI::App app{"tsl - pressureless hydrodynamics on the torus, spectral laboratory"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    ExperimentContext ctx;
    bool seed_given = false;
    app.add_option("--config", config_path, "key = value configuration file");
    auto* seed_opt = app.add_option("--seed", ctx.seed, "root RNG seed");
    app.add_option("--out", ctx.out_dir, "output directory");
    app.add_flag("--quiet", ctx.quiet, "suppress progress lines");
    app.add_option("--jobs", ctx.jobs, "worker pool size for sweeps (0 = auto)");

    double nu = 1.0;
    int kmax = 8, dim = 3, samples = 100;
    double eps = 1e-3, lag_eps = 1e-4, agg_eps = 1e-2;
    bool cross_check = false;
    std::vector<double> eps_list{1e-2, 3e-3, 1e-3};

    auto* c_spectrum = app.add_subcommand("spectrum", "characteristic roots over a lattice");
    c_spectrum->add_option("--nu", nu, "viscosity");
    c_spectrum->add_option("--kmax", kmax, "max |k|_inf");
    c_spectrum->add_option("--dim", dim, "dimension");

    auto* c_sim = app.add_subcommand("simulate", "nonlinear run with diagnostics");
    auto* c_sweep = app.add_subcommand("sweep", "stability amplification sweep");
    c_sweep->add_option("--eps", eps_list, "perturbation sizes");
    auto* c_linver = app.add_subcommand("linear-verify", "mode solver vs RK4 oracle");
    auto* c_lagr = app.add_subcommand("lagrangian-check", "Eulerian/Lagrangian equivalence");
    c_lagr->add_option("--eps", lag_eps, "perturbation size");
    auto* c_besov = app.add_subcommand("besov-certify", "inequality certifiers");
    c_besov->add_option("--samples", samples, "samples per certifier");
    auto* c_picard = app.add_subcommand("picard", "contraction construction");
    c_picard->add_option("--eps", eps, "initial data size");
    c_picard->add_flag("--cross-check", cross_check, "compare against the Eulerian run");
    auto* c_agg = app.add_subcommand("aggregation", "quasi-stationary aggregation model");
    c_agg->add_option("--eps", agg_eps, "perturbation size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }
    seed_given = seed_opt->count() > 0;

    try {
        SimConfig cfg;
        if (!config_path.empty()) {
            cfg = sim_config_from(ConfigMap::parse_file(config_path));
            if (!seed_given) ctx.seed = cfg.seed;
        }
        if (const char* env_out = std::getenv("TSL_OUT")) ctx.out_dir = env_out;

        if (*c_spectrum) return run_spectrum(nu, kmax, dim, ctx);
        if (*c_sim) return run_simulate(cfg, ctx);
        if (*c_sweep) return run_sweep(cfg, eps_list, ctx);
        if (*c_linver) return run_linear_verify(cfg, ctx);
        if (*c_lagr) return run_lagrangian_check(cfg, lag_eps, ctx);
        if (*c_besov) return run_besov_certify(cfg, samples, ctx);
        if (*c_picard) return run_picard(cfg, eps, cross_check, ctx);
        if (*c_agg) return run_aggregation(cfg, agg_eps, ctx);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
