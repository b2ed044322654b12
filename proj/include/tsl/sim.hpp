#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsl/field.hpp"

// Time integration of the nonlinear system
//   rho_t + div(rho v) = 0
//   v_t = -(v. grad) v + (1/rho) Laplace v -/+ grad K rho
// on the dealiased band, with an exact integrating factor for the stiff
// Laplace part, plus the quasi-stationary aggregation model.

namespace tsl {

enum class ForcingSign { repulsive, attractive };

struct SimConfig {
    int dim = 3;
    int n = 16;
    double dt = 0.01;
    double t_end = 10.0;
    double cfl = 0.5;
    double rho_min = 0.05;
    ForcingSign sign = ForcingSign::repulsive;
    std::string scheme = "imex2";
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    double besov_p = 2.5;  // index for the budget norms
    int sample_every = 10;

    void validate() const;
};

struct FluidState {
    SpectralField rho;
    SpectralField v;
    double t = 0.0;

    FluidState() = default;
    explicit FluidState(const TorusGrid& g) : rho(g, 1), v(g, g.dim) { rho.comp(0)[0] = 1.0; }
};

struct PositivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CflError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Rhs {
    SpectralField rho_t;
    SpectralField v_t;         // full right-hand side
    SpectralField v_remainder; // v_t minus the Laplace v part (explicit piece)
};

// Throws PositivityError when min rho on the collocation grid <= rho_min.
Rhs rhs_eulerian(const FluidState& s, ForcingSign sign, double rho_min);

// One IMEX step (exact e^{-|k|^2 dt} factor on v, two-stage second order
// explicit remainder). Returns the dt actually taken after the CFL cut.
double step(FluidState& s, const SimConfig& cfg);

struct SimResult {
    std::vector<double> times;
    std::vector<SpectralField> rho;
    std::vector<SpectralField> v;
    bool aborted = false;
    std::string abort_reason;
    FluidState last;
    int steps = 0;
};

// Runs to t_end or abort, sampling every cfg.sample_every accepted steps.
// The observer (optional) sees every accepted step.
SimResult simulate(FluidState initial, const SimConfig& cfg,
                   const std::function<void(const FluidState&, int)>& observer = nullptr);

// Aggregation model rho_t = K div(rho grad K rho); mean preserved exactly.
SpectralField aggregation_rhs(const SpectralField& rho);

void aggregation_step(SpectralField& rho, double dt, double rho_min);

struct AggregationResult {
    std::vector<double> times;
    std::vector<SpectralField> rho;
    bool aborted = false;
    std::string abort_reason;
};

AggregationResult aggregation_simulate(SpectralField rho0, double dt, double t_end,
                                       double rho_min, int sample_every = 10);

}  // namespace tsl
