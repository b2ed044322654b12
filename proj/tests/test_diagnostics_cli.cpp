#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "tsl/besov.hpp"
#include "tsl/diagnostics.hpp"
#include "tsl/experiments.hpp"
#include "tsl/io.hpp"
#include "tsl/ops.hpp"
#include "tsl/rng.hpp"
#include "tsl/stokes.hpp"

using namespace tsl;
using testutil::make_cos;

TEST_CASE("record: ground state values") {
    TorusGrid g(3, 16);
    FluidState s(g);
    DiagnosticsRecord r = record(s, ForcingSign::repulsive, 0.05, 2.5);
    CHECK(r.energy == 0.0);
    CHECK(r.hminus1 == 0.0);
    CHECK(r.mass == doctest::Approx(std::pow(kTwoPi, 3)).epsilon(1e-14));
    for (double m : r.momentum) CHECK(m == 0.0);
    CHECK(r.max_rho == doctest::Approx(1.0));
    CHECK(r.min_rho == doctest::Approx(1.0));
    for (double b : r.budget) CHECK(b == 0.0);
}

TEST_CASE("single cosine density gives the analytic H^{-1} energy") {
    // rho = 1 + cos x1 touches zero, so the functionals are probed directly
    TorusGrid g(3, 16);
    FluidState s(g);
    s.rho += make_cos(g, 0, 1);
    const double expect = std::pow(kTwoPi, 3) / 2.0;  // ||rho-1||^2_{H^-1}
    const double h = hminus1_norm(s.rho);
    CHECK(h * h == doctest::Approx(expect).epsilon(1e-12));
    CHECK(energy_functional(s) == doctest::Approx(expect / 2.0).epsilon(1e-12));
    // a bounded perturbation exercises the full record
    FluidState s2(g);
    s2.rho += make_cos(g, 0, 1, 0.5);
    DiagnosticsRecord r = record(s2, ForcingSign::repulsive, 0.05, 2.5);
    CHECK(r.hminus1 * r.hminus1 == doctest::Approx(0.25 * expect).epsilon(1e-12));
    CHECK(r.max_rho == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(r.min_rho == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("int rho K rho equals the squared H^{-1} norm of the perturbation") {
    TorusGrid g(3, 16);
    std::mt19937_64 rng = make_rng(5, 0);
    FluidState s(g);
    s.rho += random_field(g, 1, 4, 1e-2, rng);
    const double lhs = integral(multiply(s.rho, poisson_inverse(s.rho)));
    const double h = hminus1_norm(s.rho);
    CHECK(lhs == doctest::Approx(h * h).epsilon(1e-10));
}

TEST_CASE("CSV schema: fixed header and column count") {
    CHECK(diagnostics_csv_header(3) ==
          "t,energy,hminus1,dissipation,mass,momentum_1,momentum_2,momentum_3,"
          "max_rho,min_rho,div_v_inf,div_v_int,budget_s1,budget_s2,budget_s3,"
          "budget_s4,budget_s5,budget_s6");
    TorusGrid g(2, 8);
    FluidState s(g);
    DiagnosticsSeries series(ForcingSign::repulsive, 0.05, 1.5);
    series.push(s);
    std::ostringstream os;
    series.write_csv(os);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    const auto ncols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    CHECK(ncols == 17);  // d=2: 17 columns
    CHECK(std::count(row.begin(), row.end(), ',') + 1 == static_cast<long>(ncols));
}

TEST_CASE("energy identity residual shrinks at second order under step halving") {
    TorusGrid g(3, 16);
    std::mt19937_64 rng = make_rng(7, 1);
    FluidState init(g);
    init.rho += random_field(g, 1, 2, 1e-3, rng, 0.5);
    init.v = random_field(g, 3, 2, 1e-3, rng, 0.5);
    auto max_residual = [&](double dt) {
        SimConfig cfg;
        cfg.dim = 3;
        cfg.n = 16;
        cfg.dt = dt;
        cfg.t_end = 0.5;
        cfg.cfl = 1.0;
        double prev_e = 0.0, prev_d = 0.0, worst = 0.0;
        bool first = true;
        simulate(init, cfg, [&](const FluidState& st, int stepno) {
            const double e = energy_functional(st);
            const double d = dissipation_functional(st.v);
            if (!first && stepno > 0) worst = std::max(worst, std::abs(e - prev_e + dt * prev_d));
            prev_e = e;
            prev_d = d;
            first = false;
        });
        return worst;
    };
    const double r1 = max_residual(0.01);
    const double r2 = max_residual(0.005);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.5);
}

TEST_CASE("density stays under the divergence-integral bound") {
    TorusGrid g(3, 16);
    std::mt19937_64 rng = make_rng(11, 2);
    FluidState init(g);
    init.rho += random_field(g, 1, 2, 5e-3, rng, 0.5);
    init.v = random_field(g, 3, 2, 5e-3, rng, 0.5);
    SimConfig cfg;
    cfg.dim = 3;
    cfg.n = 16;
    cfg.dt = 5e-3;
    cfg.t_end = 2.0;
    cfg.cfl = 1.0;
    DiagnosticsSeries series(cfg.sign, cfg.rho_min, cfg.besov_p);
    SimResult res = simulate(init, cfg, [&](const FluidState& st, int stepno) {
        if (stepno % cfg.sample_every == 0) series.push(st);
    });
    REQUIRE(!res.aborted);
    const double max0 = series.rows().front().max_rho;
    for (const auto& r : series.rows())
        CHECK(r.max_rho <= max0 * std::exp(r.div_v_int) * (1.0 + 1e-6));
}

TEST_CASE("decay_fit: single-mode linear run decays at 2|Re lambda_+|") {
    TorusGrid g(3, 16);
    SpectralField a0 = make_cos(g, 0, 1, 1e-3);
    SpectralField u0(g, 3);
    TimeGrid tg{0.01, 3000};
    LinearSolution sol = solve_linear_system(a0, u0, nullptr, nullptr, 1.0, tg, 10);
    DecayFit fit = decay_fit(sol.times, sol.u, 0.8, 20);
    REQUIRE(!fit.degenerate);
    REQUIRE(fit.k2_shells.size() == 1);
    CHECK(fit.k2_shells[0] == 1.0);
    CHECK(fit.rates[0] == doctest::Approx(1.0).epsilon(0.1));  // 2 |Re l+| = 1 at k^2 = 1
}

TEST_CASE("decay_fit: degenerate cases are flagged") {
    TorusGrid g(2, 8);
    std::vector<double> times = {0.0, 0.1};
    std::vector<SpectralField> v(2, SpectralField(g, 2));
    DecayFit fit = decay_fit(times, v, 0.5, 20);
    CHECK(fit.degenerate);
}

TEST_CASE("field checkpoints round trip through the TSLF container") {
    TorusGrid g(3, 8);
    std::mt19937_64 rng = make_rng(13, 3);
    SpectralField f = random_field(g, 3, 3, 1.0, rng);
    const std::string path = "/tmp/tsl_test_field.tslf";
    save_field(path, f, {{"t", 2.5}});
    SpectralField f2 = load_field(path);
    REQUIRE(f2.grid == f.grid);
    REQUIRE(f2.ncomp == f.ncomp);
    for (std::size_t i = 0; i < f.coef.size(); ++i) CHECK(f.coef[i] == f2.coef[i]);
    nlohmann::json side = load_sidecar(path);
    CHECK(side["t"] == 2.5);
    CHECK(side["format"] == "TSLF");
}

TEST_CASE("scaled perturbations hit the requested budget with zero momentum") {
    TorusGrid g(3, 16);
    for (double eps : {1e-2, 1e-3}) {
        FluidState s = scaled_perturbation(g, eps, 2.5, 99);
        SpectralField a = s.rho;
        a.coef[0] -= 1.0;
        const double shi = 3.0 / 2.5;
        const double budget = besov_norm(a, {shi, 2.5, 1.0}) +
                              besov_norm(s.v, {shi - 1.0, 2.5, 1.0});
        CHECK(budget == doctest::Approx(eps).epsilon(1e-4));
        SpectralField mom = multiply(s.rho, s.v);
        for (int c = 0; c < 3; ++c) CHECK(std::abs(mom.comp(c)[0]) < 1e-15);
    }
}

TEST_CASE("experiment runners emit bit-identical CSV for the same seed") {
    ExperimentContext ctx;
    ctx.quiet = true;
    ctx.seed = 31415;
    auto read_file = [](const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    ctx.out_dir = "/tmp/tsl_det_a";
    REQUIRE(run_spectrum(1.0, 4, 3, ctx) == 0);
    ctx.out_dir = "/tmp/tsl_det_b";
    REQUIRE(run_spectrum(1.0, 4, 3, ctx) == 0);
    CHECK(read_file("/tmp/tsl_det_a/spectrum.csv") == read_file("/tmp/tsl_det_b/spectrum.csv"));

    SimConfig cfg;
    cfg.dim = 2;
    cfg.n = 8;
    cfg.dt = 0.01;
    cfg.t_end = 0.2;
    cfg.besov_p = 1.5;
    cfg.sample_every = 5;
    ctx.out_dir = "/tmp/tsl_det_a";
    REQUIRE(run_simulate(cfg, ctx) == 0);
    ctx.out_dir = "/tmp/tsl_det_b";
    REQUIRE(run_simulate(cfg, ctx) == 0);
    CHECK(read_file("/tmp/tsl_det_a/diagnostics.csv") ==
          read_file("/tmp/tsl_det_b/diagnostics.csv"));
}
