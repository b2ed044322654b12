#pragma once

#include <vector>

#include "tsl/field.hpp"
#include "tsl/stokes.hpp"

// Picard construction for the nonlinear system in Lagrangian form: each
// sweep solves the linear compressible Stokes system with the quadratic
// forcings
//   h = -a div u + (1+a)(div - div_u) u
//   g = a grad K a - a u_t + (Delta_u - Delta) u
//       + (1+a)(grad K - grad_u (-Delta_u)^{-1}) a
// assembled from the previous iterate, and reports the contraction of the
// six-term norm family between consecutive iterates.

namespace tsl {

struct PicardConfig {
    double horizon = 20.0;
    double dt = 0.1;       // forcing sample spacing
    int max_iter = 10;
    double besov_p = 2.5;
    double tol = 1e-10;    // stop once delta_n falls below this
    int norm_stride = 2;   // time subsampling for the norm family
};

struct PicardSweep {
    double delta = 0.0;        // ||iterate_n - iterate_{n-1}|| in the family
    double contraction = 0.0;  // delta_n / delta_{n-1} (0 for the first sweep)
    double gamma = 0.0;        // sup_t int_0^t ||grad u||_inf
};

struct PicardResult {
    TimeGrid tg;
    std::vector<SpectralField> a, u, at, ut;
    std::vector<PicardSweep> history;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;  // delta grew twice in a row
};

// The six-term budget on sampled trajectories (L^inf / L^1 in time realized
// as max / rectangle sum over every stride-th sample).
double budget_norm(const TimeGrid& tg, int stride, const std::vector<SpectralField>& a,
                   const std::vector<SpectralField>& at, const std::vector<SpectralField>& u,
                   const std::vector<SpectralField>& ut, double p);

// Iterates S starting from S(0,0). Throws if the Neumann smallness
// ||int grad u|| >= 1/2 is violated along the way.
PicardResult picard_iterate(const SpectralField& a0, const SpectralField& u0,
                            const PicardConfig& cfg);

struct LagrangianResidual {
    double continuity = 0.0;  // max_t L2 residual of eta_t + eta div_u u
    double momentum = 0.0;    // max_t L2 residual of eta u_t - Delta_u u + eta grad_u K_u a
};

// Residual of the Lagrangian system evaluated on the iterate's samples.
LagrangianResidual lagrangian_residual(const PicardResult& pr);

}  // namespace tsl
