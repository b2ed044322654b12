#include "tsl/picard.hpp"

#include <cmath>
#include <stdexcept>

#include "tsl/besov.hpp"
#include "tsl/lagrangian.hpp"
#include "tsl/ops.hpp"
#include "tsl/parallel.hpp"

namespace tsl {

namespace {

// (i,j) entry = d_j u_i
SpectralField grad_matrix(const SpectralField& u) {
    const int d = u.grid.dim;
    SpectralField G(u.grid, d * d);
    for (int i = 0; i < d; ++i) {
        SpectralField ui(u.grid, 1);
        std::copy(u.comp(i).begin(), u.comp(i).end(), ui.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dij = derivative(ui, j);
            std::copy(dij.comp(0).begin(), dij.comp(0).end(), G.comp(i * d + j).begin());
        }
    }
    return G;
}

double frobenius_sup(const SpectralField& M) {
    GridValues v = inverse_transform(M);
    const std::size_t npts = v.points();
    return par::max(npts, [&](std::size_t p) {
        double s = 0.0;
        for (int c = 0; c < M.ncomp; ++c) {
            const double x = v.val[static_cast<std::size_t>(c) * npts + p];
            s += x * x;
        }
        return std::sqrt(s);
    });
}

struct ForcingSet {
    std::vector<SpectralField> h;
    std::vector<SpectralField> g;
    double gamma_max = 0.0;
};

// Walks the iterate and builds (h, g) at every sample, advancing the
// accumulated gradient int_0^t grad u by the trapezoid rule.
ForcingSet assemble_forcings(const TimeGrid& tg, const std::vector<SpectralField>& a,
                             const std::vector<SpectralField>& u,
                             const std::vector<SpectralField>& ut) {
    const TorusGrid& grid = a.front().grid;
    const int d = grid.dim;
    ForcingSet out;
    SpectralField G(grid, d * d);
    double gamma = 0.0;
    SpectralField gm_prev = grad_matrix(u.front());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0) {
            SpectralField gm = grad_matrix(u[i]);
            G += (0.5 * tg.dt) * (gm_prev + gm);
            gamma += 0.5 * tg.dt * (frobenius_sup(gm_prev) + frobenius_sup(gm));
            gm_prev = std::move(gm);
        }
        out.gamma_max = std::max(out.gamma_max, gamma);
        if (out.gamma_max >= 0.5)
            throw std::runtime_error("picard: Neumann smallness ||int grad u|| >= 1/2 violated");
        DeformationMatrix dm = invert_jacobian(G, gamma);
        LagrangianOps ops(dm.A);

        SpectralField divu = divergence(u[i]);
        SpectralField ddiff = divu - ops.div_u(u[i]);
        SpectralField h = (-1.0) * multiply(a[i], divu) + ddiff + multiply(a[i], ddiff);

        SpectralField gradKa = gradient(poisson_inverse(a[i]));
        SpectralField g = (-1.0) * multiply(a[i], gradKa);
        g -= multiply(a[i], ut[i]);
        g += ops.commutator_laplacian(u[i]);
        SpectralField f = ops.inverse_laplacian(a[i]).f;
        SpectralField q = gradKa - ops.grad_u(f);
        g += q + multiply(a[i], q);

        out.h.push_back(std::move(h));
        out.g.push_back(std::move(g));
    }
    return out;
}

}  // namespace

double budget_norm(const TimeGrid& tg, int stride, const std::vector<SpectralField>& a,
                   const std::vector<SpectralField>& at, const std::vector<SpectralField>& u,
                   const std::vector<SpectralField>& ut, double p) {
    const int d = a.front().grid.dim;
    const double s_hi = d / p;
    double sup_a = 0.0, int_at = 0.0, int_alow = 0.0;
    double sup_u = 0.0, int_ut = 0.0, int_uhigh = 0.0;
    const double w = tg.dt * stride;
    for (std::size_t i = 0; i < a.size(); i += static_cast<std::size_t>(stride)) {
        sup_a = std::max(sup_a, besov_norm(a[i], {s_hi, p, 1.0}));
        int_at += w * besov_norm(at[i], {s_hi, p, 1.0});
        int_alow += w * besov_norm(remove_mean(a[i]), {s_hi - 2.0, p, 1.0});
        sup_u = std::max(sup_u, besov_norm(u[i], {s_hi - 1.0, p, 1.0}));
        int_ut += w * besov_norm(ut[i], {s_hi - 1.0, p, 1.0});
        SpectralField umz = u[i];
        for (int c = 0; c < umz.ncomp; ++c) umz.comp(c)[0] = cplx{};
        int_uhigh += w * besov_norm(umz, {s_hi + 1.0, p, 1.0});
    }
    return sup_a + int_at + int_alow + sup_u + int_ut + int_uhigh;
}

PicardResult picard_iterate(const SpectralField& a0, const SpectralField& u0,
                            const PicardConfig& cfg) {
    const TorusGrid& grid = a0.grid;
    TimeGrid tg{cfg.dt, static_cast<int>(std::lround(cfg.horizon / cfg.dt))};

    PicardResult res;
    res.tg = tg;

    // first sweep: S(0,0) is the plain linear solution
    LinearSolution sol = solve_linear_system(a0, u0, nullptr, nullptr, 1.0, tg, 1);
    res.a = std::move(sol.a);
    res.u = std::move(sol.u);
    res.at = std::move(sol.at);
    res.ut = std::move(sol.ut);
    res.iterations = 1;

    double prev_delta = 0.0;
    int grew = 0;
    for (int n = 1; n < cfg.max_iter; ++n) {
        ForcingSet fs = assemble_forcings(tg, res.a, res.u, res.ut);
        auto h_at = [&fs](int i) { return fs.h[static_cast<std::size_t>(i)]; };
        auto g_at = [&fs](int i) { return fs.g[static_cast<std::size_t>(i)]; };
        LinearSolution next = solve_linear_system(a0, u0, h_at, g_at, 1.0, tg, 1);
        ++res.iterations;

        std::vector<SpectralField> da(res.a.size(), SpectralField(grid, 1)),
            dat(res.a.size(), SpectralField(grid, 1));
        std::vector<SpectralField> du(res.a.size(), SpectralField(grid, grid.dim)),
            dut(res.a.size(), SpectralField(grid, grid.dim));
        for (std::size_t i = 0; i < res.a.size(); ++i) {
            da[i] = next.a[i] - res.a[i];
            dat[i] = next.at[i] - res.at[i];
            du[i] = next.u[i] - res.u[i];
            dut[i] = next.ut[i] - res.ut[i];
        }
        const double delta = budget_norm(tg, cfg.norm_stride, da, dat, du, dut, cfg.besov_p);

        PicardSweep sweep;
        sweep.delta = delta;
        sweep.contraction = (n >= 2 && prev_delta > 0.0) ? delta / prev_delta : 0.0;
        sweep.gamma = fs.gamma_max;
        res.history.push_back(sweep);

        res.a = std::move(next.a);
        res.u = std::move(next.u);
        res.at = std::move(next.at);
        res.ut = std::move(next.ut);

        if (n >= 2 && delta > prev_delta) {
            if (++grew >= 2) {
                res.diverged = true;
                break;
            }
        } else {
            grew = 0;
        }
        prev_delta = delta;
        if (delta < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    if (!res.diverged && !res.history.empty() &&
        res.history.back().contraction < 1.0)
        res.converged = true;
    return res;
}

LagrangianResidual lagrangian_residual(const PicardResult& pr) {
    const TorusGrid& grid = pr.a.front().grid;
    const int d = grid.dim;
    LagrangianResidual out;
    SpectralField G(grid, d * d);
    double gamma = 0.0;
    SpectralField gm_prev = grad_matrix(pr.u.front());
    for (std::size_t i = 0; i < pr.a.size(); ++i) {
        if (i > 0) {
            SpectralField gm = grad_matrix(pr.u[i]);
            G += (0.5 * pr.tg.dt) * (gm_prev + gm);
            gamma += 0.5 * pr.tg.dt * (frobenius_sup(gm_prev) + frobenius_sup(gm));
            gm_prev = std::move(gm);
        }
        DeformationMatrix dm = invert_jacobian(G, gamma);
        LagrangianOps ops(dm.A);

        SpectralField divu_u = ops.div_u(pr.u[i]);
        SpectralField r1 = pr.at[i] + divu_u + multiply(pr.a[i], divu_u);
        out.continuity = std::max(out.continuity, lp_norm(r1, 2.0));

        SpectralField f = ops.inverse_laplacian(pr.a[i]).f;
        SpectralField q = ops.grad_u(f);
        SpectralField r2 = pr.ut[i] + multiply(pr.a[i], pr.ut[i]) - laplacian(pr.u[i]) -
                           ops.commutator_laplacian(pr.u[i]) + q + multiply(pr.a[i], q);
        out.momentum = std::max(out.momentum, lp_norm(r2, 2.0));
    }
    return out;
}

}  // namespace tsl
