#include "tsl/stokes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "tsl/ops.hpp"
#include "tsl/parallel.hpp"

namespace tsl {

double phi1(double z) {
    if (std::abs(z) < 0.1) {
        // sum z^n/(n+1)!
        double term = 1.0, acc = 1.0;
        for (int n = 1; n <= 12; ++n) {
            term *= z / (n + 1);
            acc += term;
        }
        return acc;
    }
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 0.1) {
        // sum z^n/(n+2)!
        double term = 0.5, acc = 0.5;
        for (int n = 1; n <= 12; ++n) {
            term *= z / (n + 2);
            acc += term;
        }
        return acc;
    }
    return (std::expm1(z) - z) / (z * z);
}

cplx sinch(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0);
    }
    return std::sinh(z) / z;
}

namespace {

using Mat6 = std::array<double, 36>;

Mat6 mul6(const Mat6& a, const Mat6& b) {
    Mat6 c{};
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) {
            const double aik = a[i * 6 + k];
            if (aik == 0.0) continue;
            for (int j = 0; j < 6; ++j) c[i * 6 + j] += aik * b[k * 6 + j];
        }
    return c;
}

Mat6 expm6(Mat6 x) {
    double norm = 0.0;
    for (int i = 0; i < 6; ++i) {
        double row = 0.0;
        for (int j = 0; j < 6; ++j) row += std::abs(x[i * 6 + j]);
        norm = std::max(norm, row);
    }
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (double& v : x) v *= scale;

    Mat6 sum{}, term{};
    for (int i = 0; i < 6; ++i) sum[i * 6 + i] = term[i * 6 + i] = 1.0;
    for (int n = 1; n <= 40; ++n) {
        term = mul6(term, x);
        double mx = 0.0;
        for (int i = 0; i < 36; ++i) {
            term[i] /= n;
            sum[i] += term[i];
            mx = std::max(mx, std::abs(term[i]));
        }
        if (mx < 1e-20) break;
    }
    for (int i = 0; i < squarings; ++i) sum = mul6(sum, sum);
    return sum;
}

// Exact step operator for y' = M y + F(t) with M = [[0,1],[-1,-b]] and
// piecewise-linear F: y+ = E y + dt (P1 F0 + P2 (F1 - F0)). Obtained from
// the augmented exponential exp([[M dt, I, 0], [0, 0, I], [0, 0, 0]]).
struct StepOp {
    double e[4], p1[4], p2[4];
};

StepOp make_step_op(double b, double dt) {
    Mat6 x{};
    x[0 * 6 + 1] = dt;
    x[1 * 6 + 0] = -dt;
    x[1 * 6 + 1] = -b * dt;
    x[0 * 6 + 2] = 1.0;
    x[1 * 6 + 3] = 1.0;
    x[2 * 6 + 4] = 1.0;
    x[3 * 6 + 5] = 1.0;
    const Mat6 e = expm6(x);
    StepOp op;
    op.e[0] = e[0];
    op.e[1] = e[1];
    op.e[2] = e[6];
    op.e[3] = e[7];
    op.p1[0] = e[2];
    op.p1[1] = e[3];
    op.p1[2] = e[8];
    op.p1[3] = e[9];
    op.p2[0] = e[4];
    op.p2[1] = e[5];
    op.p2[2] = e[10];
    op.p2[3] = e[11];
    return op;
}

}  // namespace

ModeSolution characteristic_roots_k2(double k2, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("characteristic_roots: nu must be positive");
    if (!(k2 > 0.0)) throw std::domain_error("characteristic_roots: k must be nonzero");
    ModeSolution ms;
    ms.k2 = k2;
    ms.nu = nu;
    const double b = nu * k2;
    const double disc = b * b - 4.0;
    if (std::abs(disc) < kResonanceBand) {
        ms.branch = RootBranch::resonant;
        ms.lambda_plus = ms.lambda_minus = cplx(-0.5 * b, 0.0);
    } else if (disc > 0.0) {
        ms.branch = RootBranch::generic;
        const cplx lm(-0.5 * (b + std::sqrt(disc)), 0.0);
        ms.lambda_minus = lm;
        ms.lambda_plus = 1.0 / lm;
    } else {
        ms.branch = RootBranch::generic;
        const double om = 0.5 * std::sqrt(-disc);
        ms.lambda_plus = cplx(-0.5 * b, om);
        ms.lambda_minus = cplx(-0.5 * b, -om);
    }
    return ms;
}

ModeSolution characteristic_roots(std::span<const int> k, double nu) {
    double k2 = 0.0;
    for (int v : k) k2 += static_cast<double>(v) * v;
    return characteristic_roots_k2(k2, nu);
}

ModeCoefficients mode_coefficients(const ModeSolution& ms, cplx a0) {
    if (ms.branch == RootBranch::resonant) return {cplx{}, a0};
    const cplx diff = ms.lambda_plus - ms.lambda_minus;
    const cplx A = a0 / diff;
    return {A, -A};
}

ModeTrajectory solve_homogeneous_mode(const ModeSolution& ms, cplx a0, const TimeGrid& tg) {
    ModeTrajectory traj;
    traj.d.resize(tg.samples());
    traj.ddot.resize(tg.samples());
    const cplx mid = 0.5 * (ms.lambda_plus + ms.lambda_minus);
    const cplx del = 0.5 * (ms.lambda_plus - ms.lambda_minus);
    for (int i = 0; i < tg.samples(); ++i) {
        const double t = tg.time(i);
        const cplx emt = std::exp(mid * t);
        const cplx s = sinch(del * t);
        traj.d[i] = a0 * t * emt * s;
        traj.ddot[i] = a0 * emt * (mid * t * s + std::cosh(del * t));
    }
    return traj;
}

ModeTrajectory solve_forced_mode(const ModeSolution& ms, cplx a0, std::span<const cplx> h,
                                 const TimeGrid& tg) {
    if (h.size() != static_cast<std::size_t>(tg.samples()))
        throw std::invalid_argument("solve_forced_mode: forcing does not match time grid");
    const StepOp op = make_step_op(ms.nu * ms.k2, tg.dt);
    ModeTrajectory traj;
    traj.d.resize(tg.samples());
    traj.ddot.resize(tg.samples());
    cplx d{}, dd = a0;
    traj.d[0] = d;
    traj.ddot[0] = dd;
    for (int i = 0; i < tg.nt; ++i) {
        const cplx f0 = -h[static_cast<std::size_t>(i)];
        const cplx df = -h[static_cast<std::size_t>(i) + 1] - f0;
        const cplx dn = op.e[0] * d + op.e[1] * dd + tg.dt * (op.p1[1] * f0 + op.p2[1] * df);
        const cplx ddn = op.e[2] * d + op.e[3] * dd + tg.dt * (op.p1[3] * f0 + op.p2[3] * df);
        d = dn;
        dd = ddn;
        traj.d[static_cast<std::size_t>(i) + 1] = d;
        traj.ddot[static_cast<std::size_t>(i) + 1] = dd;
    }
    return traj;
}

std::vector<SpectralField> heat_lift(const SpectralField& w0,
                                     const std::function<SpectralField(int)>& forcing, double nu,
                                     const TimeGrid& tg, int store_stride) {
    const std::size_t nm = w0.modes();
    std::vector<double> eh(nm), q1(nm), q2(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        const double z = -nu * w0.grid.k_squared(i) * tg.dt;
        eh[i] = std::exp(z);
        q1[i] = phi1(z);
        q2[i] = phi2(z);
    }
    SpectralField state = w0;
    std::vector<SpectralField> out;
    out.push_back(state);
    SpectralField fcur, fnext;
    if (forcing) {
        fcur = forcing(0);
        if (!fcur.same_shape(w0)) throw std::invalid_argument("heat_lift: forcing shape mismatch");
    }
    const std::size_t total = nm * static_cast<std::size_t>(w0.ncomp);
    for (int i = 0; i < tg.nt; ++i) {
        if (forcing) {
            fnext = forcing(i + 1);
            par::for_each(total, [&](std::size_t j) {
                const std::size_t m = j % nm;
                const cplx f0 = fcur.coef[j];
                const cplx df = fnext.coef[j] - f0;
                state.coef[j] = eh[m] * state.coef[j] + tg.dt * (q1[m] * f0 + q2[m] * df);
            });
            fcur = std::move(fnext);
        } else {
            par::for_each(total, [&](std::size_t j) { state.coef[j] *= eh[j % nm]; });
        }
        if ((i + 1) % store_stride == 0 || i + 1 == tg.nt) out.push_back(state);
    }
    return out;
}

SpectrumTable spectrum_report(double nu, int kmax, int dim) {
    if (kmax < 1) throw std::invalid_argument("spectrum_report: kmax must be >= 1");
    SpectrumTable tab;
    tab.dim = dim;
    tab.nu = nu;
    tab.kmax = kmax;
    tab.min_gap_over_k2 = 1e300;
    tab.min_re_lambda_plus = 1e300;
    tab.asymptote_dev = 0.0;
    int k[kMaxDim] = {0, 0, 0, 0};
    for (int a = 0; a < dim; ++a) k[a] = -kmax;
    while (true) {
        bool zero = true;
        for (int a = 0; a < dim; ++a)
            if (k[a] != 0) zero = false;
        if (!zero) {
            SpectrumRow row;
            std::copy(k, k + dim, row.k);
            const ModeSolution ms =
                characteristic_roots(std::span<const int>(k, static_cast<std::size_t>(dim)), nu);
            row.k2 = ms.k2;
            row.lambda_plus = ms.lambda_plus;
            row.lambda_minus = ms.lambda_minus;
            row.branch = ms.branch;
            tab.rows.push_back(row);
            if (ms.branch == RootBranch::generic) {
                const double gap = std::abs(ms.lambda_plus - ms.lambda_minus) / ms.k2;
                tab.min_gap_over_k2 = std::min(tab.min_gap_over_k2, gap);
            }
            const double re = std::abs(ms.lambda_plus.real());
            tab.min_re_lambda_plus = std::min(tab.min_re_lambda_plus, re);
            if (ms.k2 >= 25.0)
                tab.asymptote_dev = std::max(tab.asymptote_dev, std::abs(nu * re * ms.k2 - 1.0));
        }
        int a = dim - 1;
        while (a >= 0 && ++k[a] > kmax) k[a--] = -kmax;
        if (a < 0) break;
    }
    return tab;
}

void SpectrumTable::write_csv(std::ostream& os) const {
    for (int a = 0; a < dim; ++a) os << "k" << (a + 1) << ",";
    os << "ksq,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,branch\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (const auto& r : rows) {
        for (int a = 0; a < dim; ++a) os << r.k[a] << ",";
        put(r.k2);
        os << ",";
        put(r.lambda_plus.real());
        os << ",";
        put(r.lambda_plus.imag());
        os << ",";
        put(r.lambda_minus.real());
        os << ",";
        put(r.lambda_minus.imag());
        os << "," << (r.branch == RootBranch::resonant ? "resonant" : "generic") << "\n";
    }
}

LinearSolution solve_linear_system(const SpectralField& a0, const SpectralField& u0,
                                   const std::function<SpectralField(int)>& h,
                                   const std::function<SpectralField(int)>& g, double nu,
                                   const TimeGrid& tg, int store_stride) {
    const TorusGrid& grid = a0.grid;
    const int dim = grid.dim;
    if (a0.ncomp != 1) throw std::invalid_argument("solve_linear_system: a0 must be scalar");
    if (!(u0.grid == grid) || u0.ncomp != dim)
        throw std::invalid_argument("solve_linear_system: u0 must be a vector field on the grid");
    const std::size_t nm = grid.num_modes();

    // per-mode data
    std::vector<double> k2(nm), eh(nm), q1(nm), q2(nm);
    std::vector<double> e00(nm), e01(nm), e10(nm), e11(nm), p101(nm), p111(nm), p201(nm), p211(nm);
    std::vector<int> kvec(nm * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < nm; ++i) {
        int kk[kMaxDim];
        grid.wavevector(i, kk);
        for (int a = 0; a < dim; ++a) kvec[i * static_cast<std::size_t>(dim) + a] = kk[a];
        k2[i] = grid.k_squared(i);
        const double z = -nu * k2[i] * tg.dt;
        eh[i] = std::exp(z);
        q1[i] = phi1(z);
        q2[i] = phi2(z);
        if (i > 0) {
            const StepOp op = make_step_op(nu * k2[i], tg.dt);
            e00[i] = op.e[0];
            e01[i] = op.e[1];
            e10[i] = op.e[2];
            e11[i] = op.e[3];
            p101[i] = op.p1[1];
            p111[i] = op.p1[3];
            p201[i] = op.p2[1];
            p211[i] = op.p2[3];
        }
    }

    auto div_at = [&](const std::vector<cplx>& vec, std::size_t m) {
        cplx s{};
        for (int c = 0; c < dim; ++c) {
            const int ka = kvec[m * static_cast<std::size_t>(dim) + c];
            if (std::abs(ka) == grid.n / 2) continue;  // odd-order derivative: Nyquist dropped
            s += cplx(0.0, ka) * vec[static_cast<std::size_t>(c) * nm + m];
        }
        return s;
    };

    // state
    std::vector<cplx> dk(nm, cplx{}), ddk(nm), ak(nm), ak_next(nm);
    std::vector<cplx> uk(u0.coef), utilk(u0.coef);
    for (std::size_t i = 0; i < nm; ++i) {
        ddk[i] = (i == 0) ? cplx{} : a0.coef[i];
        ak[i] = a0.coef[i];
    }

    const SpectralField zero_scalar(grid, 1);
    const SpectralField zero_vector(grid, dim);
    SpectralField hcur = h ? h(0) : zero_scalar;
    SpectralField gcur = g ? g(0) : zero_vector;
    if (hcur.ncomp != 1 || !(hcur.grid == grid))
        throw std::invalid_argument("solve_linear_system: h must be scalar on the grid");
    if (gcur.ncomp != dim || !(gcur.grid == grid))
        throw std::invalid_argument("solve_linear_system: g must be a vector field on the grid");

    std::vector<cplx> htil_cur(nm), htil_next(nm);
    par::for_each(nm, [&](std::size_t m) { htil_cur[m] = hcur.coef[m] - div_at(utilk, m); });

    // ring buffers (three consecutive levels) for the Simpson residuals
    struct Level {
        std::vector<cplx> a, u, h, g;
    };
    std::array<Level, 3> ring;
    for (auto& lv : ring) {
        lv.a.resize(nm);
        lv.u.resize(nm * static_cast<std::size_t>(dim));
        lv.h.resize(nm);
        lv.g.resize(nm * static_cast<std::size_t>(dim));
    }
    auto capture = [&](int level) {
        Level& lv = ring[static_cast<std::size_t>(level % 3)];
        std::copy(ak.begin(), ak.end(), lv.a.begin());
        std::copy(uk.begin(), uk.end(), lv.u.begin());
        std::copy(hcur.coef.begin(), hcur.coef.end(), lv.h.begin());
        std::copy(gcur.coef.begin(), gcur.coef.end(), lv.g.begin());
    };
    capture(0);

    LinearSolution sol;
    sol.tg = tg;
    sol.store_stride = store_stride;

    auto store_sample = [&](int i) {
        sol.times.push_back(tg.time(i));
        SpectralField fa(grid, 1), fu(grid, dim), fat(grid, 1), fut(grid, dim), fd(grid, 1);
        std::copy(ak.begin(), ak.end(), fa.coef.begin());
        std::copy(uk.begin(), uk.end(), fu.coef.begin());
        std::copy(dk.begin(), dk.end(), fd.coef.begin());
        par::for_each(nm, [&](std::size_t m) {
            fat.coef[m] = (m == 0) ? hcur.coef[0] : htil_cur[m] - dk[m];
        });
        par::for_each(nm * static_cast<std::size_t>(dim), [&](std::size_t j) {
            const std::size_t m = j % nm;
            const int c = static_cast<int>(j / nm);
            cplx f = gcur.coef[j];
            if (m != 0) {
                const int ka = kvec[m * static_cast<std::size_t>(dim) + c];
                f -= cplx(0.0, ka / k2[m]) * ak[m];
            }
            fut.coef[j] = -nu * k2[m] * uk[j] + f;
        });
        sol.a.push_back(std::move(fa));
        sol.u.push_back(std::move(fu));
        sol.at.push_back(std::move(fat));
        sol.ut.push_back(std::move(fut));
        sol.d.push_back(std::move(fd));
    };
    store_sample(0);

    const double vol_factor = std::pow(kTwoPi, 0.5 * dim);
    SpectralField hnext, gnext;

    for (int i = 0; i < tg.nt; ++i) {
        hnext = h ? h(i + 1) : zero_scalar;
        gnext = g ? g(i + 1) : zero_vector;

        // heat lift of (u0, g)
        par::for_each(nm * static_cast<std::size_t>(dim), [&](std::size_t j) {
            const std::size_t m = j % nm;
            const cplx f0 = gcur.coef[j];
            const cplx df = gnext.coef[j] - f0;
            utilk[j] = eh[m] * utilk[j] + tg.dt * (q1[m] * f0 + q2[m] * df);
        });
        par::for_each(nm, [&](std::size_t m) { htil_next[m] = hnext.coef[m] - div_at(utilk, m); });

        // mode ODE d'' + nu k^2 d' + d = htil (consistent with both equations)
        par::for_each(nm, [&](std::size_t m) {
            if (m == 0) return;
            const cplx f0 = htil_cur[m];
            const cplx df = htil_next[m] - f0;
            const cplx dn = e00[m] * dk[m] + e01[m] * ddk[m] + tg.dt * (p101[m] * f0 + p201[m] * df);
            const cplx ddn =
                e10[m] * dk[m] + e11[m] * ddk[m] + tg.dt * (p111[m] * f0 + p211[m] * df);
            dk[m] = dn;
            ddk[m] = ddn;
        });

        // a - {a} = d_t - nu Laplace d;  {a} integrates {h}
        const cplx mean_a = ak[0] + 0.5 * tg.dt * (htil_cur[0] + htil_next[0]);
        par::for_each(nm, [&](std::size_t m) {
            ak_next[m] = (m == 0) ? mean_a : ddk[m] + nu * k2[m] * dk[m];
        });

        // recover u as the heat solution forced by -grad K a + g
        par::for_each(nm * static_cast<std::size_t>(dim), [&](std::size_t j) {
            const std::size_t m = j % nm;
            const int c = static_cast<int>(j / nm);
            cplx f0 = gcur.coef[j];
            cplx f1 = gnext.coef[j];
            if (m != 0) {
                const cplx sym(0.0, kvec[m * static_cast<std::size_t>(dim) + c] / k2[m]);
                f0 -= sym * ak[m];
                f1 -= sym * ak_next[m];
            }
            uk[j] = eh[m] * uk[j] + tg.dt * (q1[m] * f0 + q2[m] * (f1 - f0));
        });

        std::swap(ak, ak_next);
        std::swap(htil_cur, htil_next);
        hcur = std::move(hnext);
        gcur = std::move(gnext);
        capture(i + 1);

        // Simpson residuals over the sliding triple (t_{i-1}, t_i, t_{i+1})
        if (i >= 1) {
            const Level& l0 = ring[static_cast<std::size_t>((i - 1) % 3)];
            const Level& l1 = ring[static_cast<std::size_t>(i % 3)];
            const Level& l2 = ring[static_cast<std::size_t>((i + 1) % 3)];
            auto divu = [&](const Level& lv, std::size_t m) { return div_at(lv.u, m); };
            const double w = tg.dt / 3.0;
            const double r1sq = par::sum(nm, [&](std::size_t m) {
                const cplx q0 = l0.h[m] - divu(l0, m);
                const cplx q1v = l1.h[m] - divu(l1, m);
                const cplx q2v = l2.h[m] - divu(l2, m);
                const cplx r = (l2.a[m] - l0.a[m]) - w * (q0 + 4.0 * q1v + q2v);
                return std::norm(r);
            });
            const double r2sq = par::sum(nm * static_cast<std::size_t>(dim), [&](std::size_t j) {
                const std::size_t m = j % nm;
                const int c = static_cast<int>(j / nm);
                auto rhs = [&](const Level& lv) {
                    cplx f = lv.g[j] - nu * k2[m] * lv.u[j];
                    if (m != 0) {
                        const cplx sym(0.0, kvec[m * static_cast<std::size_t>(dim) + c] / k2[m]);
                        f -= sym * lv.a[m];
                    }
                    return f;
                };
                const cplx r = (l2.u[j] - l0.u[j]) - w * (rhs(l0) + 4.0 * rhs(l1) + rhs(l2));
                return std::norm(r);
            });
            const double inv2dt = 1.0 / (2.0 * tg.dt);
            sol.residual_continuity =
                std::max(sol.residual_continuity, vol_factor * std::sqrt(r1sq) * inv2dt);
            sol.residual_momentum =
                std::max(sol.residual_momentum, vol_factor * std::sqrt(r2sq) * inv2dt);
        }

        if ((i + 1) % store_stride == 0 || i + 1 == tg.nt) store_sample(i + 1);
    }
    return sol;
}

}  // namespace tsl
