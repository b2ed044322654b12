#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "tsl/sim.hpp"

// Energy / conservation / norm-budget diagnostics for simulation runs.

namespace tsl {

struct DiagnosticsRecord {
    double t = 0.0;
    double energy = 0.0;       // E = 1/2 int (rho |v|^2 + rho K rho)
    double hminus1 = 0.0;      // ||rho - 1||_{H^{-1}}
    double dissipation = 0.0;  // int |grad v|^2
    double mass = 0.0;         // int rho
    std::vector<double> momentum;
    double max_rho = 0.0;
    double min_rho = 0.0;
    double div_v_inf = 0.0;
    double div_v_int = 0.0;  // running integral, filled by DiagnosticsSeries
    // instantaneous budget norms with s* = d/p:
    //   s1 ||rho-1||_{B^{s*}}, s2 ||rho_t||_{B^{s*}}, s3 ||rho-1-{.}||_{B^{s*-2}},
    //   s4 ||v||_{B^{s*-1}}, s5 ||v_t||_{B^{s*-1}}, s6 ||v||_{B^{s*+1}}
    std::vector<double> budget;
};

double hminus1_norm(const SpectralField& rho);
double energy_functional(const FluidState& s);
double dissipation_functional(const SpectralField& v);

DiagnosticsRecord record(const FluidState& s, ForcingSign sign, double rho_min, double besov_p);

// Accumulates records plus the running time integrals; one CSV row per push.
class DiagnosticsSeries {
  public:
    DiagnosticsSeries(ForcingSign sign, double rho_min, double besov_p)
        : sign_(sign), rho_min_(rho_min), besov_p_(besov_p) {}

    void push(const FluidState& s);

    const std::vector<DiagnosticsRecord>& rows() const { return rows_; }

    // Theorem-style running budget at sample i:
    //   sup_{tau<=t_i} s1 + int_0^{t_i} s5 + int_0^{t_i} s6   (rectangle sums)
    double running_budget(std::size_t i) const;
    double peak_budget() const;

    void write_csv(std::ostream& os) const;
    nlohmann::json summary() const;

  private:
    ForcingSign sign_;
    double rho_min_;
    double besov_p_;
    std::vector<DiagnosticsRecord> rows_;
    std::vector<double> run_sup_s1_, run_int_s5_, run_int_s6_;
};

std::string diagnostics_csv_header(int dim);

// Tail decay rates of log ||v_k||^2 per |k|^2 shell.
struct DecayFit {
    std::vector<double> k2_shells;
    std::vector<double> rates;  // positive = decay, fitted on the tail
    bool degenerate = false;
};

DecayFit decay_fit(const std::vector<double>& times, const std::vector<SpectralField>& v,
                   double tail_fraction = 0.5, std::size_t min_samples = 20);

}  // namespace tsl
