#include "tsl/sim.hpp"

#include <algorithm>
#include <cmath>

#include "tsl/ops.hpp"
#include "tsl/parallel.hpp"

namespace tsl {

void SimConfig::validate() const {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("SimConfig: dim out of range");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("SimConfig: n must be even and >= 8");
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("SimConfig: t_end must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("SimConfig: cfl must be in (0,1]");
    if (!(rho_min > 0.0)) throw std::invalid_argument("SimConfig: rho_min must be positive");
    if (sample_every < 1) throw std::invalid_argument("SimConfig: sample_every must be >= 1");
}

namespace {

double max_speed(const GridValues& vv) {
    const std::size_t npts = vv.points();
    return par::max(npts, [&](std::size_t p) {
        double s2 = 0.0;
        for (int c = 0; c < vv.ncomp; ++c) {
            const double x = vv.val[static_cast<std::size_t>(c) * npts + p];
            s2 += x * x;
        }
        return std::sqrt(s2);
    });
}

}  // namespace

Rhs rhs_eulerian(const FluidState& s, ForcingSign sign, double rho_min) {
    const TorusGrid& g = s.rho.grid;
    const int d = g.dim;
    const std::size_t npts = g.num_modes();

    GridValues rhov = inverse_transform(s.rho);
    const double rho_floor =
        -par::max(npts, [&](std::size_t p) { return -rhov.val[p]; });
    if (!(rho_floor > rho_min))
        throw PositivityError("density dropped below the positivity floor");

    GridValues vv = inverse_transform(s.v);
    GridValues lapv = inverse_transform(laplacian(s.v));
    GridValues forcev = inverse_transform(gradient(poisson_inverse(s.rho)));

    // d_j v_i, entry (i,j)
    SpectralField dv(g, d * d);
    for (int i = 0; i < d; ++i) {
        SpectralField vi(g, 1);
        std::copy(s.v.comp(i).begin(), s.v.comp(i).end(), vi.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dij = derivative(vi, j);
            std::copy(dij.comp(0).begin(), dij.comp(0).end(), dv.comp(i * d + j).begin());
        }
    }
    GridValues dvv = inverse_transform(dv);

    // mass flux rho v and the explicit velocity remainder on the grid
    GridValues flux(g.dim, g.n, d);
    GridValues rem(g.dim, g.n, d);
    const double force_sgn = (sign == ForcingSign::repulsive) ? -1.0 : 1.0;
    par::for_each(npts, [&](std::size_t p) {
        const double rho = rhov.val[p];
        const double invrho = 1.0 / rho;
        for (int i = 0; i < d; ++i) {
            const double vi = vv.val[static_cast<std::size_t>(i) * npts + p];
            flux.val[static_cast<std::size_t>(i) * npts + p] = rho * vi;
            double adv = 0.0;
            for (int j = 0; j < d; ++j)
                adv += vv.val[static_cast<std::size_t>(j) * npts + p] *
                       dvv.val[static_cast<std::size_t>(i * d + j) * npts + p];
            rem.val[static_cast<std::size_t>(i) * npts + p] =
                -adv + (invrho - 1.0) * lapv.val[static_cast<std::size_t>(i) * npts + p] +
                force_sgn * forcev.val[static_cast<std::size_t>(i) * npts + p];
        }
    });

    Rhs out;
    SpectralField fluxf = transform(flux, g);
    dealias(fluxf);
    out.rho_t = (-1.0) * divergence(fluxf);
    out.v_remainder = transform(rem, g);
    dealias(out.v_remainder);
    out.v_t = out.v_remainder + laplacian(s.v);
    return out;
}

namespace {

// Velocity from the momentum density, pointwise on the dealiased grid, with
// the positivity floor enforced on rho.
SpectralField velocity_from_momentum(const SpectralField& m, const SpectralField& rho,
                                     double rho_min) {
    const TorusGrid& g = rho.grid;
    GridValues rhov = inverse_transform(rho);
    const std::size_t npts = rhov.points();
    const double floor = -par::max(npts, [&](std::size_t p) { return -rhov.val[p]; });
    if (!(floor > rho_min))
        throw PositivityError("density dropped below the positivity floor");
    GridValues mv = inverse_transform(m);
    GridValues vv(g.dim, g.n, g.dim);
    par::for_each(npts, [&](std::size_t p) {
        const double inv = 1.0 / rhov.val[p];
        for (int c = 0; c < g.dim; ++c)
            vv.val[static_cast<std::size_t>(c) * npts + p] =
                inv * mv.val[static_cast<std::size_t>(c) * npts + p];
    });
    SpectralField v = transform(vv, g);
    dealias(v);
    return v;
}

// Right-hand side in conservative variables (rho, m = rho v):
//   rho_t = -div m
//   m_t   = Laplace m + [ -div(m x v) + Laplace(v - m) -/+ rho grad K rho ]
// Every term has an exactly vanishing zero mode, so mass and momentum are
// conserved structurally by the stepper; Laplace m carries the integrating
// factor and the bracket is the explicit remainder. v = m/rho is derived,
// never part of the evolved state.
struct ConservativeRhs {
    SpectralField rho_t;
    SpectralField m_remainder;
};

ConservativeRhs rhs_conservative(const SpectralField& rho, const SpectralField& m,
                                 const SpectralField& v, ForcingSign sign) {
    const TorusGrid& g = rho.grid;
    const int d = g.dim;
    const std::size_t npts = g.num_modes();

    ConservativeRhs out;
    out.rho_t = (-1.0) * divergence(m);

    // momentum flux div(m x v): T_ij = m_i v_j, (div T)_i = d_j T_ij
    GridValues mv = inverse_transform(m);
    GridValues vv = inverse_transform(v);
    GridValues tv(g.dim, g.n, d * d);
    par::for_each(npts, [&](std::size_t p) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                tv.val[static_cast<std::size_t>(i * d + j) * npts + p] =
                    mv.val[static_cast<std::size_t>(i) * npts + p] *
                    vv.val[static_cast<std::size_t>(j) * npts + p];
    });
    SpectralField T = transform(tv, g);
    dealias(T);

    // rho grad K rho
    SpectralField force = multiply(rho, gradient(poisson_inverse(rho)));
    const double force_sgn = (sign == ForcingSign::repulsive) ? -1.0 : 1.0;

    out.m_remainder = laplacian(v - m) + force_sgn * force;
    for (int i = 0; i < d; ++i) {
        SpectralField ti(g, 1);
        auto acc = out.m_remainder.comp(i);
        for (int j = 0; j < d; ++j) {
            std::copy(T.comp(i * d + j).begin(), T.comp(i * d + j).end(), ti.comp(0).begin());
            SpectralField dj = derivative(ti, j);
            par::for_each(npts, [&](std::size_t q) { acc[q] -= dj.comp(0)[q]; });
        }
    }
    return out;
}

// Conservative state carried across a whole run; v is derived on demand.
struct ConsState {
    SpectralField rho;
    SpectralField m;
    double t = 0.0;
};

double step_conservative(ConsState& s, const SimConfig& cfg) {
    const TorusGrid& g = s.rho.grid;
    SpectralField v = velocity_from_momentum(s.m, s.rho, cfg.rho_min);
    GridValues vv = inverse_transform(v);
    const double vmax = max_speed(vv);
    const double dt = std::min(cfg.dt, cfg.cfl * g.spacing() / (vmax + 1e-12));
    if (dt < 1e-10) throw CflError("CFL collapse: effective time step below 1e-10");

    const std::size_t nm = g.num_modes();
    std::vector<double> P(nm);
    for (std::size_t i = 0; i < nm; ++i) P[i] = std::exp(-g.k_squared(i) * dt);
    auto apply_P = [&](SpectralField& f) {
        for (int c = 0; c < f.ncomp; ++c) {
            auto sp = f.comp(c);
            par::for_each(nm, [&](std::size_t i) { sp[i] *= P[i]; });
        }
    };

    const ConservativeRhs r1 = rhs_conservative(s.rho, s.m, v, cfg.sign);

    SpectralField rho_pred = s.rho + dt * r1.rho_t;
    SpectralField m_pred = s.m + dt * r1.m_remainder;
    apply_P(m_pred);
    SpectralField v_pred = velocity_from_momentum(m_pred, rho_pred, cfg.rho_min);
    const ConservativeRhs r2 = rhs_conservative(rho_pred, m_pred, v_pred, cfg.sign);

    s.rho += (0.5 * dt) * (r1.rho_t + r2.rho_t);
    SpectralField mnew = s.m + (0.5 * dt) * r1.m_remainder;
    apply_P(mnew);
    mnew += (0.5 * dt) * r2.m_remainder;
    s.m = std::move(mnew);
    // touch the derived velocity once so positivity aborts fire at the step
    (void)velocity_from_momentum(s.m, s.rho, cfg.rho_min);
    s.t += dt;

    // conservation, not projection: the flux form leaves the mean untouched
    if (std::abs(mean(s.rho) - 1.0) > 1e-12)
        throw std::logic_error("continuity lost the unit mean");
    return dt;
}

}  // namespace

double step(FluidState& s, const SimConfig& cfg) {
    ConsState c{s.rho, multiply(s.rho, s.v), s.t};
    const double dt = step_conservative(c, cfg);
    s.rho = std::move(c.rho);
    s.v = velocity_from_momentum(c.m, s.rho, cfg.rho_min);
    s.t = c.t;
    return dt;
}

SimResult simulate(FluidState initial, const SimConfig& cfg,
                   const std::function<void(const FluidState&, int)>& observer) {
    cfg.validate();
    SimResult res;
    ConsState s{initial.rho, multiply(initial.rho, initial.v), initial.t};
    FluidState view = std::move(initial);
    auto refresh_view = [&]() {
        view.rho = s.rho;
        view.v = velocity_from_momentum(s.m, s.rho, cfg.rho_min);
        view.t = s.t;
    };
    auto sample = [&]() {
        res.times.push_back(view.t);
        res.rho.push_back(view.rho);
        res.v.push_back(view.v);
    };
    sample();
    if (observer) observer(view, 0);
    try {
        while (s.t < cfg.t_end - 1e-12) {
            SimConfig local = cfg;
            local.dt = std::min(cfg.dt, cfg.t_end - s.t);
            step_conservative(s, local);
            ++res.steps;
            const bool due = res.steps % cfg.sample_every == 0 || s.t >= cfg.t_end - 1e-12;
            if (observer || due) refresh_view();
            if (observer) observer(view, res.steps);
            if (due) sample();
        }
    } catch (const PositivityError& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    } catch (const CflError& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    }
    view.rho = s.rho;
    view.t = s.t;
    try {
        view.v = velocity_from_momentum(s.m, s.rho, cfg.rho_min);
    } catch (const PositivityError&) {
        // keep the last representable velocity for the abort record
    }
    if (res.times.back() != s.t) sample();
    res.last = std::move(view);
    return res;
}

SpectralField aggregation_rhs(const SpectralField& rho) {
    SpectralField flux = multiply(rho, gradient(poisson_inverse(rho)));
    return poisson_inverse(divergence(flux));
}

void aggregation_step(SpectralField& rho, double dt, double rho_min) {
    if (min_on_grid(rho, 0, 1) <= rho_min)
        throw PositivityError("aggregation: density dropped below the positivity floor");
    SpectralField k1 = aggregation_rhs(rho);
    SpectralField pred = rho + dt * k1;
    if (min_on_grid(pred, 0, 1) <= rho_min)
        throw PositivityError("aggregation: predictor lost positivity");
    SpectralField k2 = aggregation_rhs(pred);
    rho += (0.5 * dt) * (k1 + k2);
}

AggregationResult aggregation_simulate(SpectralField rho0, double dt, double t_end,
                                       double rho_min, int sample_every) {
    AggregationResult res;
    double t = 0.0;
    int steps = 0;
    res.times.push_back(t);
    res.rho.push_back(rho0);
    try {
        while (t < t_end - 1e-12) {
            const double h = std::min(dt, t_end - t);
            aggregation_step(rho0, h, rho_min);
            t += h;
            ++steps;
            if (steps % sample_every == 0 || t >= t_end - 1e-12) {
                res.times.push_back(t);
                res.rho.push_back(rho0);
            }
        }
    } catch (const PositivityError& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    }
    return res;
}

}  // namespace tsl
