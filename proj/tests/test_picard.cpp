#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tsl/lagrangian.hpp"
#include "tsl/ops.hpp"
#include "tsl/picard.hpp"
#include "tsl/rng.hpp"
#include "tsl/sim.hpp"

using namespace tsl;
using testutil::make_cos;

TEST_CASE("S(0,0) with zero data is the zero fixed point") {
    TorusGrid g(3, 8);
    SpectralField a0(g, 1), u0(g, 3);
    PicardConfig cfg;
    cfg.horizon = 2.0;
    cfg.dt = 0.1;
    cfg.max_iter = 3;
    PicardResult res = picard_iterate(a0, u0, cfg);
    CHECK(res.converged);
    for (const auto& f : res.a)
        for (auto& z : f.coef) CHECK(std::abs(z) == 0.0);
    for (const auto& f : res.u)
        for (auto& z : f.coef) CHECK(std::abs(z) == 0.0);
    CHECK(res.history.front().delta == 0.0);
}

TEST_CASE("single-mode small data contracts fast and closes the equations") {
    TorusGrid g(3, 16);
    const double eps = 1e-3;
    SpectralField a0 = make_cos(g, 0, 1, eps);
    SpectralField u0(g, 3);
    PicardConfig cfg;
    cfg.horizon = 5.0;
    cfg.dt = 0.05;
    cfg.max_iter = 6;
    cfg.tol = 1e-14;
    PicardResult res = picard_iterate(a0, u0, cfg);
    REQUIRE(res.history.size() >= 2);
    CHECK(!res.diverged);
    // empirical contraction well under 1/2 for eps = 1e-3
    for (std::size_t i = 1; i < res.history.size(); ++i) {
        if (res.history[i].delta == 0.0) break;
        CHECK(res.history[i].contraction < 0.5);
    }
    CHECK(res.history.front().gamma < 0.5);

    LagrangianResidual r = lagrangian_residual(res);
    CHECK(r.continuity < 1e-6);
    CHECK(r.momentum < 1e-6);
}

TEST_CASE("delta_1 scales quadratically with the data size") {
    TorusGrid g(3, 8);
    SpectralField u0(g, 3);
    PicardConfig cfg;
    cfg.horizon = 2.0;
    cfg.dt = 0.1;
    cfg.max_iter = 2;
    cfg.tol = 0.0;
    auto delta1 = [&](double eps) {
        SpectralField a0 = make_cos(g, 0, 1, eps);
        PicardResult res = picard_iterate(a0, u0, cfg);
        REQUIRE(!res.history.empty());
        return res.history.front().delta;
    };
    const double d_full = delta1(2e-3);
    const double d_half = delta1(1e-3);
    CHECK(d_half / d_full > 0.15);
    CHECK(d_half / d_full < 0.35);
}

TEST_CASE("picard limit matches the Eulerian run pulled back to Lagrangian form") {
    TorusGrid g(3, 16);
    const double eps = 1e-3;
    SpectralField a0 = make_cos(g, 0, 1, eps);
    SpectralField u0(g, 3);

    PicardConfig pcfg;
    pcfg.horizon = 2.0;
    pcfg.dt = 0.05;
    pcfg.max_iter = 5;
    PicardResult pic = picard_iterate(a0, u0, pcfg);

    FluidState init(g);
    init.rho += a0;
    SimConfig scfg;
    scfg.dim = 3;
    scfg.n = 16;
    scfg.dt = 0.005;
    scfg.t_end = 2.0;
    scfg.cfl = 1.0;
    scfg.sample_every = 10;  // matches the 0.05 Picard sampling
    SimResult sim = simulate(init, scfg);
    REQUIRE(!sim.aborted);
    REQUIRE(sim.times.size() == pic.a.size());

    auto reports = equivalence_check(sim.times, sim.rho, sim.v, pic.a, pic.u);
    double worst = 0.0;
    for (const auto& r : reports) {
        worst = std::max(worst, r.max_density_mismatch);
        worst = std::max(worst, r.max_velocity_mismatch);
    }
    CHECK(worst < 1e-4);
}
