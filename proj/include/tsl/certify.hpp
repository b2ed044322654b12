#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tsl/besov.hpp"
#include "tsl/field.hpp"

// Statistical certifiers for the functional inequalities: each one evaluates
// the inequality's ratio over seeded random samples and reports the
// empirical constant plus a trend diagnostic. The constants in the theory
// are never numeric, so these certify boundedness and stability, not values.

namespace tsl {

struct CertificateReport {
    std::string inequality;
    nlohmann::json params;
    int samples = 0;
    std::uint64_t seed = 0;
    double empirical_max = 0.0;
    double trend_slope = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
};

// ||f||_q <= C d_Lambda^{d/p - d/q} ||f||_p on block-supported fields,
// blocks m = 1..4; the trend slope is the fit of log(max ratio) against m
// and must stay within +-0.1 for a pass.
// band = 0 uses the grid's own n/2 - 1; pass a fixed band for N -> 2N
// refinement studies so both grids see the same functions.
CertificateReport certify_nikolskij(const TorusGrid& g, int samples, double p, double q,
                                    std::uint64_t seed, int band = 0);

// ||u||_inf <= C ||u||_{B^{d/p}_{p,1}} over random trig polynomials.
CertificateReport certify_embedding(const TorusGrid& g, int samples, double p,
                                    std::uint64_t seed);

// ||fg||_{B^s_{p,1}} <= C ||f||_{B^{d/p}_{p,1}} ||g||_{B^s_{p,1}},
// p in [2, d), s defaulting to d/p.
CertificateReport certify_product_law(const TorusGrid& g, int samples, double p, double s,
                                      std::uint64_t seed);

struct DiffeoRatios {
    double forward = 0.0;  // ||f o Z||_{B^s_{p,1}} / ||f||_{B^s_{p,1}}
    double inverse = 0.0;  // ||f o Z^{-1}||_{B^s_{p,1}} / ||f||_{B^s_{p,1}}
};

// Z = id + disp must be a grid diffeomorphism with ||grad Z - I||_inf < 1/2.
DiffeoRatios certify_diffeo_invariance(const SpectralField& f, const SpectralField& disp,
                                       double s, double p);

// Maximal regularity of the heat equation: solves d_t f - Laplace f = g with
// f(0) = 0 by the per-mode Duhamel formula for mean-zero separable forcings
// and reports (||f_t||_{L1 B^s} + ||f||_{L1 B^{s+2}}) / ||g||_{L1 B^s}; time
// integrals by composite Simpson on `time_nodes` uniform nodes.
CertificateReport certify_max_regularity(const TorusGrid& g, int samples, double s, double p,
                                         double horizon, std::uint64_t seed,
                                         int time_nodes = 257);

}  // namespace tsl
