#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tsl/certify.hpp"
#include "tsl/ops.hpp"
#include "tsl/rng.hpp"
#include "tsl/stokes.hpp"

using namespace tsl;
using testutil::make_constant;
using testutil::make_cos;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("nikolskij: p = q gives ratio exactly one") {
    TorusGrid g(3, 16);
    CertificateReport rep = certify_nikolskij(g, 5, 2.0, 2.0, 1234);
    CHECK(rep.empirical_max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rep.trend_slope) < 1e-10);
    CHECK(rep.pass);
}

TEST_CASE("nikolskij: single mode ratio is finite and matches direct evaluation") {
    TorusGrid g(3, 16);
    int k[3] = {4, 0, 0};
    SpectralField e = testutil::make_exp_pair(g, k);
    const double r = lp_norm(e, kInf) * std::pow(8.0, -3.0) / lp_norm(e, 1.0);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
}

TEST_CASE("nikolskij: max ratio is stable across blocks for p=2, q=inf") {
    TorusGrid g(3, 16);
    CertificateReport rep = certify_nikolskij(g, 25, 2.0, kInf, 77);
    CHECK(rep.pass);
    CHECK(rep.trend_slope <= 0.1);  // no growth across blocks
    // deterministic given the seed
    CertificateReport rep2 = certify_nikolskij(g, 25, 2.0, kInf, 77);
    CHECK(rep.empirical_max == rep2.empirical_max);
    CHECK(rep.trend_slope == rep2.trend_slope);
    CHECK_THROWS(certify_nikolskij(g, 5, 3.0, 2.0, 1));  // q < p
}

TEST_CASE("embedding: constants give the exact ratio, certifier stays finite") {
    TorusGrid g(3, 16);
    SpectralField one = make_constant(g, 1.0);
    const double p = 3.0;
    const double ratio = lp_norm(one, kInf) / besov_norm(one, {1.0, p, 1.0});
    CHECK(ratio == doctest::Approx(std::pow(kTwoPi, -1.0)).epsilon(1e-12));

    CertificateReport rep = certify_embedding(g, 30, p, 99);
    CHECK(rep.pass);
    CHECK(rep.empirical_max > 0.0);
    CHECK(std::isfinite(rep.empirical_max));
}

TEST_CASE("product law: zero factor and constant factor behave as expected") {
    TorusGrid g(3, 16);
    std::mt19937_64 rng = make_rng(3, 0);
    SpectralField f = random_field(g, 1, 3, 1.0, rng);
    SpectralField zero(g, 1);
    SpectralField prod = multiply(f, zero);
    for (auto& z : prod.coef) CHECK(std::abs(z) == 0.0);

    const double p = 2.5, s = 3.0 / p;
    SpectralField one = make_constant(g, 1.0);
    const double ratio = besov_norm(multiply(one, f), {s, p, 1.0}) /
                         (besov_norm(one, {3.0 / p, p, 1.0}) * besov_norm(f, {s, p, 1.0}));
    CHECK(ratio == doctest::Approx(std::pow(kTwoPi, -3.0 / p)).epsilon(1e-10));
}

TEST_CASE("product law certifier: bounded constant inside the window, errors outside") {
    TorusGrid g(3, 16);
    CertificateReport rep = certify_product_law(g, 20, 2.5, 3.0 / 2.5, 55);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.empirical_max));
    CHECK_THROWS(certify_product_law(g, 5, 1.5, 1.0, 1));  // p below the window
    CHECK_THROWS(certify_product_law(g, 5, 2.5, 2.0, 1));  // s above d/p
}

TEST_CASE("diffeo invariance: identity map gives unit ratios") {
    TorusGrid g(3, 16);
    SpectralField disp(g, 3);
    SpectralField f = make_cos(g, 0, 1);
    DiffeoRatios r = certify_diffeo_invariance(f, disp, 0.5, 2.0);
    CHECK(r.forward == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.inverse == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("diffeo invariance: small sinusoidal map keeps ratios within [0.5, 2]") {
    TorusGrid g(3, 16);
    SpectralField disp(g, 3);
    SpectralField bump = make_cos(g, 0, 1, 0.1, -0.25 * kTwoPi);  // 0.1 sin x1
    std::copy(bump.comp(0).begin(), bump.comp(0).end(), disp.comp(0).begin());
    SpectralField f = make_cos(g, 0, 1);
    DiffeoRatios r = certify_diffeo_invariance(f, disp, 0.5, 2.0);
    CHECK(r.forward > 0.5);
    CHECK(r.forward < 2.0);
    CHECK(r.inverse > 0.5);
    CHECK(r.inverse < 2.0);

    // shrinking the displacement pulls both ratios towards one
    SpectralField disp2(g, 3);
    SpectralField bump2 = make_cos(g, 0, 1, 0.01, -0.25 * kTwoPi);
    std::copy(bump2.comp(0).begin(), bump2.comp(0).end(), disp2.comp(0).begin());
    DiffeoRatios r2 = certify_diffeo_invariance(f, disp2, 0.5, 2.0);
    CHECK(std::abs(r2.forward - 1.0) < std::abs(r.forward - 1.0));
    CHECK(std::abs(r2.inverse - 1.0) < std::abs(r.inverse - 1.0));

    // a folding map is rejected
    SpectralField disp3(g, 3);
    SpectralField bump3 = make_cos(g, 0, 1, 1.4);
    std::copy(bump3.comp(0).begin(), bump3.comp(0).end(), disp3.comp(0).begin());
    CHECK_THROWS(certify_diffeo_invariance(f, disp3, 0.5, 2.0));
}

TEST_CASE("heat forcing e^{-t} cos x1 produces the resonant duhamel profile t e^{-t}") {
    TorusGrid g(3, 16);
    SpectralField zero(g, 1);
    TimeGrid tg{1e-4, 20000};
    auto forcing = [&](int i) {
        SpectralField f = make_cos(g, 0, 1);
        f *= std::exp(-tg.time(i));
        return f;
    };
    auto traj = heat_lift(zero, forcing, 1.0, tg, 4000);
    int kp[3] = {1, 0, 0};
    const std::size_t mi = g.flatten(kp);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const double t = 0.4 * static_cast<double>(s);
        const double expect = 0.5 * t * std::exp(-t);  // per conjugate mode
        CHECK(std::abs(traj[s].coef[mi].real() - expect) < 1e-8);
    }
}

TEST_CASE("maximal regularity certifier: finite, deterministic, time-grid stable") {
    TorusGrid g(3, 8);
    CertificateReport rep = certify_max_regularity(g, 10, 0.0, 2.0, 5.0, 2024);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.empirical_max));
    CHECK(rep.empirical_max > 0.0);

    CertificateReport rep2 = certify_max_regularity(g, 10, 0.0, 2.0, 5.0, 2024);
    CHECK(rep.empirical_max == rep2.empirical_max);

    CertificateReport fine = certify_max_regularity(g, 10, 0.0, 2.0, 5.0, 2024, 513);
    CHECK(fine.empirical_max ==
          doctest::Approx(rep.empirical_max).epsilon(0.02));  // +-2% under refinement
}

TEST_CASE("certificate report serializes the full schema") {
    TorusGrid g(3, 8);
    CertificateReport rep = certify_embedding(g, 5, 2.0, 7);
    nlohmann::json j = rep.to_json();
    for (const char* key :
         {"inequality", "params", "samples", "seed", "empirical_max", "trend_slope", "pass"})
        CHECK(j.contains(key));
    CHECK(j["inequality"] == "embedding");
    CHECK(j["samples"] == 5);
}
