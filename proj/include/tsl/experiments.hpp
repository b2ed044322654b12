#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsl/diagnostics.hpp"
#include "tsl/sim.hpp"

// Experiment runners behind the CLI subcommands. Every runner writes its
// CSV / JSON / .dat outputs under the context's output directory and returns
// 0 on pass, 1 on experiment failure.

namespace tsl {

struct ExperimentContext {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool quiet = false;
    int jobs = 0;  // 0 = available parallelism
};

// Random perturbed state with the initial budget
// ||v0||_{B^{d/p-1}} + ||rho0 - 1||_{B^{d/p}} scaled to eps and int rho0 v0 = 0.
FluidState scaled_perturbation(const TorusGrid& g, double eps, double besov_p,
                               std::uint64_t seed);

struct SweepReport {
    struct Point {
        double eps = 0.0;
        double amplification = 0.0;  // sup_t budget(t) / eps
        bool aborted = false;
    };
    std::vector<Point> points;
    double slope = 0.0;  // of log C_emp vs log eps
    bool pass = false;   // |slope| <= 0.15 and no aborts (repulsive)
};

SweepReport stability_sweep(const std::vector<double>& eps_list, const SimConfig& cfg,
                            std::uint64_t seed, int jobs = 0);

// Max abs error of solve_forced_mode against an adaptive RK4 oracle over
// all 0 < |k|^2 <= k2max with random smooth forcing.
double linear_verify_max_error(double nu, int k2max, double t_end, double dt,
                               std::uint64_t seed);

int run_spectrum(double nu, int kmax, int dim, const ExperimentContext& ctx);
int run_simulate(const SimConfig& cfg, const ExperimentContext& ctx);
int run_sweep(const SimConfig& cfg, const std::vector<double>& eps_list,
              const ExperimentContext& ctx);
int run_linear_verify(const SimConfig& cfg, const ExperimentContext& ctx);
int run_lagrangian_check(const SimConfig& cfg, double eps, const ExperimentContext& ctx);
int run_besov_certify(const SimConfig& cfg, int samples, const ExperimentContext& ctx);
int run_picard(const SimConfig& cfg, double eps, bool cross_check,
               const ExperimentContext& ctx);
int run_aggregation(const SimConfig& cfg, double eps, const ExperimentContext& ctx);

}  // namespace tsl
