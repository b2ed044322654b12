#include "tsl/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "tsl/besov.hpp"
#include "tsl/ops.hpp"

namespace tsl {

double hminus1_norm(const SpectralField& rho) {
    const TorusGrid& g = rho.grid;
    double s = 0.0;
    for (std::size_t m = 1; m < g.num_modes(); ++m)
        s += std::norm(rho.comp(0)[m]) / g.k_squared(m);
    return std::sqrt(std::pow(kTwoPi, g.dim) * s);
}

double energy_functional(const FluidState& s) {
    const double kinetic = integral(multiply(s.rho, dot(s.v, s.v)));
    const double h = hminus1_norm(s.rho);
    return 0.5 * (kinetic + h * h);
}

double dissipation_functional(const SpectralField& v) {
    const TorusGrid& g = v.grid;
    double s = 0.0;
    for (int c = 0; c < v.ncomp; ++c) {
        auto sp = v.comp(c);
        for (std::size_t m = 0; m < g.num_modes(); ++m) s += g.k_squared(m) * std::norm(sp[m]);
    }
    return std::pow(kTwoPi, g.dim) * s;
}

DiagnosticsRecord record(const FluidState& s, ForcingSign sign, double rho_min, double besov_p) {
    const TorusGrid& g = s.rho.grid;
    const int d = g.dim;
    DiagnosticsRecord r;
    r.t = s.t;
    r.energy = energy_functional(s);
    r.hminus1 = hminus1_norm(s.rho);
    r.dissipation = dissipation_functional(s.v);
    r.mass = integral(s.rho);
    SpectralField mom = multiply(s.rho, s.v);
    for (int c = 0; c < d; ++c) r.momentum.push_back(integral(mom, c));
    r.max_rho = max_on_grid(s.rho, 0, 2);
    r.min_rho = min_on_grid(s.rho, 0, 2);
    SpectralField divv = divergence(s.v);
    r.div_v_inf = lp_norm(divv, std::numeric_limits<double>::infinity());

    const Rhs rhs = rhs_eulerian(s, sign, rho_min);
    const double shi = d / besov_p;
    SpectralField a = s.rho;
    a.coef[0] -= 1.0;
    r.budget = {besov_norm(a, {shi, besov_p, 1.0}),
                besov_norm(rhs.rho_t, {shi, besov_p, 1.0}),
                besov_norm(remove_mean(a), {shi - 2.0, besov_p, 1.0}),
                besov_norm(s.v, {shi - 1.0, besov_p, 1.0}),
                besov_norm(rhs.v_t, {shi - 1.0, besov_p, 1.0}),
                besov_norm(s.v, {shi + 1.0, besov_p, 1.0})};
    return r;
}

void DiagnosticsSeries::push(const FluidState& s) {
    DiagnosticsRecord r = record(s, sign_, rho_min_, besov_p_);
    if (rows_.empty()) {
        r.div_v_int = 0.0;
        run_sup_s1_.push_back(r.budget[0]);
        run_int_s5_.push_back(0.0);
        run_int_s6_.push_back(0.0);
    } else {
        const DiagnosticsRecord& prev = rows_.back();
        const double dt = r.t - prev.t;
        // trapezoid for the density-bound integral, rectangle for the budget
        r.div_v_int = prev.div_v_int + 0.5 * dt * (prev.div_v_inf + r.div_v_inf);
        run_sup_s1_.push_back(std::max(run_sup_s1_.back(), r.budget[0]));
        run_int_s5_.push_back(run_int_s5_.back() + dt * prev.budget[4]);
        run_int_s6_.push_back(run_int_s6_.back() + dt * prev.budget[5]);
    }
    rows_.push_back(std::move(r));
}

double DiagnosticsSeries::running_budget(std::size_t i) const {
    return run_sup_s1_[i] + run_int_s5_[i] + run_int_s6_[i];
}

double DiagnosticsSeries::peak_budget() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) best = std::max(best, running_budget(i));
    return best;
}

std::string diagnostics_csv_header(int dim) {
    std::ostringstream os;
    os << "t,energy,hminus1,dissipation,mass";
    for (int c = 1; c <= dim; ++c) os << ",momentum_" << c;
    os << ",max_rho,min_rho,div_v_inf,div_v_int";
    for (int j = 1; j <= 6; ++j) os << ",budget_s" << j;
    return os.str();
}

void DiagnosticsSeries::write_csv(std::ostream& os) const {
    if (rows_.empty()) return;
    os << diagnostics_csv_header(static_cast<int>(rows_.front().momentum.size())) << "\n";
    char buf[64];
    auto put = [&](double v, bool lead_comma = true) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (lead_comma) os << ",";
        os << buf;
    };
    for (const auto& r : rows_) {
        put(r.t, false);
        put(r.energy);
        put(r.hminus1);
        put(r.dissipation);
        put(r.mass);
        for (double m : r.momentum) put(m);
        put(r.max_rho);
        put(r.min_rho);
        put(r.div_v_inf);
        put(r.div_v_int);
        for (double b : r.budget) put(b);
        os << "\n";
    }
}

nlohmann::json DiagnosticsSeries::summary() const {
    nlohmann::json j;
    j["samples"] = rows_.size();
    if (rows_.empty()) return j;
    j["t_final"] = rows_.back().t;
    j["energy_initial"] = rows_.front().energy;
    j["energy_final"] = rows_.back().energy;
    j["mass_drift"] = std::abs(rows_.back().mass - rows_.front().mass);
    double mom_drift = 0.0;
    for (std::size_t c = 0; c < rows_.front().momentum.size(); ++c)
        mom_drift = std::max(mom_drift,
                             std::abs(rows_.back().momentum[c] - rows_.front().momentum[c]));
    j["momentum_drift"] = mom_drift;
    bool monotone = true;
    for (std::size_t i = 1; i < rows_.size(); ++i)
        if (rows_[i].energy > rows_[i - 1].energy * (1.0 + 1e-12)) monotone = false;
    j["energy_nonincreasing"] = monotone;
    j["div_v_int"] = rows_.back().div_v_int;
    j["peak_budget"] = peak_budget();
    return j;
}

DecayFit decay_fit(const std::vector<double>& times, const std::vector<SpectralField>& v,
                   double tail_fraction, std::size_t min_samples) {
    DecayFit out;
    if (times.size() < min_samples) {
        out.degenerate = true;
        return out;
    }
    const TorusGrid& g = v.front().grid;
    const std::size_t start = times.size() - static_cast<std::size_t>(times.size() * tail_fraction);
    std::map<double, std::vector<double>> shell_energy;  // k2 -> per-sample energies
    for (std::size_t s = start; s < times.size(); ++s) {
        std::map<double, double> shells;
        for (int c = 0; c < v[s].ncomp; ++c) {
            auto sp = v[s].comp(c);
            for (std::size_t m = 1; m < g.num_modes(); ++m)
                shells[g.k_squared(m)] += std::norm(sp[m]);
        }
        for (auto& [k2, e] : shells) shell_energy[k2].push_back(e);
    }
    for (auto& [k2, es] : shell_energy) {
        bool positive = true;
        for (double e : es)
            if (e <= 0.0) positive = false;
        if (!positive) continue;
        // least-squares slope of log energy over the tail window
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const std::size_t n = es.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double x = times[start + i];
            const double y = std::log(es[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        if (denom == 0.0) continue;
        out.k2_shells.push_back(k2);
        out.rates.push_back(-(n * sxy - sx * sy) / denom);
    }
    out.degenerate = out.k2_shells.empty();
    return out;
}

}  // namespace tsl
